//! Meeting a sequence of dense open sets inside a pruned tree.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::trees::{leftmost_from, require_extendible, TreeSource};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// An open set given by its code: a predicate closed upward under extension.
pub type OpenCode<'a> = &'a (dyn Fn(&BitString) -> bool + Sync);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaireResult {
    pub path: BitString,
    /// Length of the prefix accepted at each stage.
    pub stage_lengths: Vec<usize>,
}

/// Least proper extension of `from`, in length-lex order, that is extendible
/// and satisfies `accept`. At most `cap` extendible candidates are examined.
pub fn search_extension(
    src: &dyn TreeSource,
    from: &BitString,
    cap: u64,
    accept: &mut dyn FnMut(&BitString) -> bool,
) -> Result<Option<BitString>> {
    let mut queue = VecDeque::from([from.clone()]);
    let mut seen = 0u64;
    while let Some(cur) = queue.pop_front() {
        for b in [false, true] {
            let next = cur.child(b);
            if !require_extendible(src, &next)? {
                continue;
            }
            if seen == cap {
                return Ok(None);
            }
            seen += 1;
            if accept(&next) {
                return Ok(Some(next));
            }
            queue.push_back(next);
        }
    }
    Ok(None)
}

/// Builds σ_0 ⊂ σ_1 ⊂ ... with σ_n ∈ V_n, then extends leftmost to `depth`.
/// The path is longer than `depth` when the stages already went deeper.
pub fn baire_intersect(
    src: &dyn TreeSource,
    opens: &[OpenCode<'_>],
    start: &BitString,
    depth: usize,
    cap: u64,
) -> Result<BaireResult> {
    if !require_extendible(src, start)? {
        return Err(Error::NotExtendible { at: start.clone() });
    }
    let mut cur = start.clone();
    let mut stage_lengths = Vec::with_capacity(opens.len());
    for (n, open) in opens.iter().enumerate() {
        let mut accept = |s: &BitString| open(s);
        cur = search_extension(src, &cur, cap, &mut accept)?
            .ok_or(Error::DensityViolated { stage: n as u32, cap })?;
        stage_lengths.push(cur.len());
    }
    let path = if cur.len() < depth { leftmost_from(src, &cur, depth)? } else { cur };
    Ok(BaireResult { path, stage_lengths })
}
