use crate::bits::BitString;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("prefix of length {len} is shorter than the {needed} entries required")]
    PrefixTooShort { needed: u64, len: u64 },
    #[error("depth {depth} exceeds the depth cap {cap}")]
    DepthCap { depth: u32, cap: u32 },
    #[error("not prefix-closed: {witness} is marked but a prefix is not")]
    Condition1 { witness: BitString },
    #[error("{witness} is marked but not in the ambient tree")]
    Condition2 { witness: BitString },
    #[error("empty level: no string of length {block} is marked")]
    Condition3 { block: u32 },
    #[error("dead end: {witness} is marked but neither child is")]
    PrunedViolation { witness: BitString },
    #[error("no extendible path through {at}")]
    NotExtendible { at: BitString },
    #[error("block {depth} is too deep for exhaustive enumeration (max {max})")]
    DepthTooLarge { depth: u32, max: u32 },
    #[error("not a cover: {witness} has no prefix in the cover")]
    NotACover { witness: BitString },
    #[error("length violation: {witness} is shorter than the cover bound")]
    LengthViolation { witness: BitString },
    #[error("no sweep index is stable across a window of {window} blocks")]
    NoStableIndex { window: u32 },
    #[error("measure precondition failed at block {block}: value {value} is below the target")]
    PreconditionMeasure { block: u32, value: String },
    #[error("stage {stage} exceeded its candidate budget")]
    BudgetExceeded { stage: u32 },
    #[error("construction needs block {needed} but the horizon is {horizon}")]
    HorizonExceeded { needed: u32, horizon: u32 },
    #[error("density promise failed at stage {stage} within {cap} candidates")]
    DensityViolated { stage: u32, cap: u64 },
    #[error("measure promise failed within search cap {cap}")]
    PromiseViolated { cap: u32 },
    #[error("tree specification is not prefix-closed at {witness}")]
    NotPrefixClosed { witness: BitString },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Coarse grouping used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Input,
    Encoding,
    Validation,
    Measure,
    Construction,
    Search,
}

impl Error {
    pub fn family(&self) -> Family {
        use Error::*;
        match self {
            Parse(_) | InvalidArgument(_) | NotPrefixClosed { .. } => Family::Input,
            PrefixTooShort { .. } | DepthCap { .. } => Family::Encoding,
            Condition1 { .. } | Condition2 { .. } | Condition3 { .. } | PrunedViolation { .. } => {
                Family::Validation
            }
            DepthTooLarge { .. } | NotACover { .. } | LengthViolation { .. } => Family::Measure,
            NoStableIndex { .. }
            | PreconditionMeasure { .. }
            | BudgetExceeded { .. }
            | HorizonExceeded { .. } => Family::Construction,
            NotExtendible { .. } | DensityViolated { .. } | PromiseViolated { .. } => Family::Search,
        }
    }

    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            PrefixTooShort { .. } => "PrefixTooShort",
            DepthCap { .. } => "DepthCap",
            Condition1 { .. } => "Condition1",
            Condition2 { .. } => "Condition2",
            Condition3 { .. } => "Condition3",
            PrunedViolation { .. } => "PrunedViolation",
            NotExtendible { .. } => "NotExtendible",
            DepthTooLarge { .. } => "DepthTooLarge",
            NotACover { .. } => "NotACover",
            LengthViolation { .. } => "LengthViolation",
            NoStableIndex { .. } => "NoStableIndex",
            PreconditionMeasure { .. } => "PreconditionMeasure",
            BudgetExceeded { .. } => "BudgetExceeded",
            HorizonExceeded { .. } => "HorizonExceeded",
            DensityViolated { .. } => "DensityViolated",
            PromiseViolated { .. } => "PromiseViolated",
            NotPrefixClosed { .. } => "NotPrefixClosed",
            Parse(_) => "ParseError",
            InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
