//! Bit accounting for the coordinator model.
//!
//! Every message carries a fixed header (it doubles as the length prefix that
//! makes messages self-delimiting) plus a payload priced by [`CostModel`].

/// Who receives a message. Players only ever talk to the coordinator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    ToCoordinator,
    ToPlayer,
}

/// Protocol step a message belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Level descent of the constant-factor estimate.
    ConstantFactor,
    /// Coordinator instructions (stop, chosen level, sampling rate).
    Control,
    /// Items of the chosen level set.
    Sample,
    /// Per-player item counts at the chosen level.
    LevelCount,
    /// Items of the second-stage Bernoulli subsample.
    ExcessSample,
    /// Hashed positions and survivor lists of duplication estimation.
    Duplication,
}

/// Prices of the message components, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    pub item_id_bits: u32,
    pub count_bits: u32,
    pub header_bits: u32,
}

/// `ceil(log2 x)`, at least 1.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        1
    } else {
        64 - (x - 1).leading_zeros()
    }
}

impl CostModel {
    pub const HEADER_BITS: u32 = 32;

    /// Ids cost `ceil(log2 n)` bits, counts `ceil(log2(F1 + 1))` bits.
    pub fn new(universe_size: u64, f1: u64) -> Self {
        Self {
            item_id_bits: ceil_log2(universe_size),
            count_bits: (64 - f1.leading_zeros()).max(1),
            header_bits: Self::HEADER_BITS,
        }
    }
}

/// Message contents, priced by the ledger.
#[derive(Clone, Debug, PartialEq)]
pub enum Message {
    /// Universe ids.
    Items(Vec<u64>),
    /// One integer count.
    Count(u64),
    /// Indices into a vector of `2^index_bits` slots or fewer.
    Positions { positions: Vec<u64>, index_bits: u32 },
    /// Fixed-width control word.
    Control { bits: u32 },
}

impl Message {
    pub fn payload_bits(&self, cost: &CostModel) -> u64 {
        match self {
            Message::Items(items) => items.len() as u64 * cost.item_id_bits as u64,
            Message::Count(_) => cost.count_bits as u64,
            Message::Positions {
                positions,
                index_bits,
            } => positions.len() as u64 * *index_bits as u64,
            Message::Control { bits } => *bits as u64,
        }
    }

    /// Number of ids or positions carried.
    pub fn item_count(&self) -> u64 {
        match self {
            Message::Items(items) => items.len() as u64,
            Message::Positions { positions, .. } => positions.len() as u64,
            Message::Count(_) | Message::Control { .. } => 0,
        }
    }
}

/// One charged message.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub round: u32,
    pub direction: Direction,
    pub player: usize,
    pub phase: Phase,
    pub header_bits: u64,
    pub payload_bits: u64,
    pub items: u64,
}

impl LedgerEntry {
    pub fn bits(&self) -> u64 {
        self.header_bits + self.payload_bits
    }
}

/// Transcript of charged messages with a running total.
#[derive(Clone, Debug, PartialEq)]
pub struct CommLedger {
    cost: CostModel,
    entries: Vec<LedgerEntry>,
    total_bits: u64,
}

impl CommLedger {
    pub fn new(cost: CostModel) -> Self {
        Self {
            cost,
            entries: Vec::new(),
            total_bits: 0,
        }
    }

    pub fn cost_model(&self) -> &CostModel {
        &self.cost
    }

    pub(crate) fn charge(
        &mut self,
        round: u32,
        direction: Direction,
        player: usize,
        phase: Phase,
        message: &Message,
    ) {
        let entry = LedgerEntry {
            round,
            direction,
            player,
            phase,
            header_bits: self.cost.header_bits as u64,
            payload_bits: message.payload_bits(&self.cost),
            items: message.item_count(),
        };
        self.total_bits += entry.bits();
        self.entries.push(entry);
    }

    pub fn total_bits(&self) -> u64 {
        self.total_bits
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn messages(&self) -> usize {
        self.entries.len()
    }

    pub fn payload_bits(&self) -> u64 {
        self.entries.iter().map(|e| e.payload_bits).sum()
    }

    pub fn payload_bits_in(&self, phase: Phase) -> u64 {
        self.in_phase(phase).map(|e| e.payload_bits).sum()
    }

    pub fn bits_in(&self, phase: Phase) -> u64 {
        self.in_phase(phase).map(LedgerEntry::bits).sum()
    }

    /// Ids or positions carried in `phase`, both directions.
    pub fn items_in(&self, phase: Phase) -> u64 {
        self.in_phase(phase).map(|e| e.items).sum()
    }

    fn in_phase(&self, phase: Phase) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.iter().filter(move |e| e.phase == phase)
    }
}
