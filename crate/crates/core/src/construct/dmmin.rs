//! Minimizing a monotone function that is dense above its infimum.

use super::baire::search_extension;
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::trees::{leftmost_from, require_extendible, TreeSource};
use crate::weights::{AlgebraicWeight, Dyadic};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A function on strings, decreasing along extensions.
#[derive(Clone)]
pub struct MonotoneFn {
    eval: Arc<dyn Fn(&BitString) -> AlgebraicWeight + Send + Sync>,
}

impl MonotoneFn {
    pub fn new<F: Fn(&BitString) -> AlgebraicWeight + Send + Sync + 'static>(f: F) -> Self {
        MonotoneFn { eval: Arc::new(f) }
    }

    pub fn eval(&self, s: &BitString) -> AlgebraicWeight {
        (self.eval)(s)
    }

    /// First pair σ ⊆ τ among `pairs` with eval(σ) < eval(τ).
    pub fn monotonicity_violation<'a, I>(&self, pairs: I) -> Option<(BitString, BitString)>
    where
        I: IntoIterator<Item = (&'a BitString, &'a BitString)>,
    {
        pairs
            .into_iter()
            .filter(|(a, b)| a.is_prefix_of(b))
            .find(|(a, b)| self.eval(a) < self.eval(b))
            .map(|(a, b)| (a.clone(), b.clone()))
    }
}

impl std::fmt::Debug for MonotoneFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("MonotoneFn")
    }
}

/// Infimum α and tolerances ε_n, 2^{-n} unless a schedule is given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityTarget {
    pub alpha: AlgebraicWeight,
    pub schedule: Option<Vec<AlgebraicWeight>>,
}

impl DensityTarget {
    pub fn new(alpha: AlgebraicWeight) -> Self {
        DensityTarget { alpha, schedule: None }
    }

    pub fn with_schedule(alpha: AlgebraicWeight, schedule: Vec<AlgebraicWeight>) -> Result<Self> {
        if schedule.first().is_some_and(|e| e.signum() <= 0) || schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument("tolerances must be positive and strictly decreasing".into()));
        }
        Ok(DensityTarget { alpha, schedule: Some(schedule) })
    }

    pub fn stages(&self, default: u32) -> u32 {
        self.schedule.as_ref().map_or(default, |s| s.len() as u32)
    }

    pub fn eps(&self, n: u32) -> AlgebraicWeight {
        match &self.schedule {
            Some(s) => s[n as usize].clone(),
            None => AlgebraicWeight::from_dyadic(Dyadic::pow2_neg(n)),
        }
    }
}

/// Proposes an extension of `prefix` with value below α + ε.
pub type DensityCallback<'a> = &'a dyn Fn(&BitString, &AlgebraicWeight) -> Option<BitString>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DmminStage {
    pub stage: u32,
    pub block: usize,
    pub value: AlgebraicWeight,
    pub bound: AlgebraicWeight,
    /// Whether the density callback supplied the extension.
    pub from_callback: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DmminResult {
    pub path: BitString,
    pub stages: Vec<DmminStage>,
}

/// Stage n meets V_n = {σ : f(σ) < α + ε_n}, first through the callback and,
/// when its proposal fails verification, through a length-lex search of at
/// most `cap` extendible candidates.
pub fn dense_monotone_min(
    src: &dyn TreeSource,
    f: &MonotoneFn,
    target: &DensityTarget,
    density: DensityCallback<'_>,
    stages: u32,
    depth: usize,
    cap: u64,
) -> Result<DmminResult> {
    let stages = target.stages(stages);
    let mut cur = BitString::empty();
    if !require_extendible(src, &cur)? {
        return Err(Error::NotExtendible { at: cur });
    }
    let mut out = Vec::new();
    for n in 0..stages {
        let bound = &target.alpha + &target.eps(n);
        let proposal = density(&cur, &target.eps(n)).filter(|p| {
            p.len() > cur.len() && cur.is_prefix_of(p) && f.eval(p) < bound && src.extendible(p) == Some(true)
        });
        let from_callback = proposal.is_some();
        let next = match proposal {
            Some(p) => p,
            None => search_extension(src, &cur, cap, &mut |s| f.eval(s) < bound)?
                .ok_or(Error::DensityViolated { stage: n, cap })?,
        };
        out.push(DmminStage { stage: n, block: next.len(), value: f.eval(&next), bound, from_callback });
        cur = next;
    }
    let path = if cur.len() < depth { leftmost_from(src, &cur, depth)? } else { cur };
    Ok(DmminResult { path, stages: out })
}
