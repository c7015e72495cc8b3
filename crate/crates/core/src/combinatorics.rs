//! Ordered tuples of pairwise cyclically nonconsecutive indices of `[k]`
//! (independent sets of the cycle graph `C_k`, with an order) and the
//! bound-multiplicity exponents `α_j` attached to them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `k` accepted by the brute-force subset filter.
pub const BRUTE_FORCE_MAX_K: usize = 20;

/// Ordered indices `r_1, …, r_n` (1-based) with their exponents `α_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdmissibleTuple {
    pub k: usize,
    pub indices: Vec<usize>,
    pub alphas: Vec<u32>,
}

impl AdmissibleTuple {
    pub fn new(k: usize, indices: Vec<usize>) -> Result<Self> {
        let alphas = compute_alphas(k, &indices)?;
        Ok(AdmissibleTuple { k, indices, alphas })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `k - n - Σα_j`: the number of variables bounded only by 1.
    pub fn free_exponent(&self) -> u32 {
        let used = self.len() as u32 + self.alphas.iter().sum::<u32>();
        self.k as u32 - used
    }

    /// Relabel every index by `r ↦ r + shift (mod k)`.
    pub fn rotated(&self, shift: usize) -> Self {
        let indices = self
            .indices
            .iter()
            .map(|&r| (r - 1 + shift) % self.k + 1)
            .collect();
        AdmissibleTuple {
            k: self.k,
            indices,
            alphas: self.alphas.clone(),
        }
    }
}

pub fn cyclic_distance(i: usize, j: usize, k: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(k - d)
}

/// Pairwise `|r_i - r_j| ∉ {0, 1, k-1}`.
pub fn is_admissible(k: usize, indices: &[usize]) -> bool {
    if k < 2 || indices.iter().any(|&r| r < 1 || r > k) {
        return false;
    }
    indices.iter().enumerate().all(|(i, &ri)| {
        indices[i + 1..]
            .iter()
            .all(|&rj| cyclic_distance(ri, rj, k) >= 2)
    })
}

fn check_size(k: usize, n: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::invalid("k", format!("must be >= 2, got {k}")));
    }
    if n < 1 || n > k / 2 {
        return Err(Error::invalid(
            "n",
            format!("must lie in 1..={} for k = {k}, got {n}", k / 2),
        ));
    }
    Ok(())
}

/// `α_j = 2 - δ(k,2) - Σ_{m<j} [δ(|r_m - r_j|, 2) + δ(|r_m - r_j|, k-2)]`,
/// the sum running over earlier tuple positions.
pub fn compute_alphas(k: usize, indices: &[usize]) -> Result<Vec<u32>> {
    if indices.is_empty() {
        return Err(Error::invalid("indices", "tuple must be nonempty"));
    }
    if !is_admissible(k, indices) {
        return Err(Error::invalid(
            "indices",
            format!("{indices:?} is not cyclically nonconsecutive in [{k}]"),
        ));
    }
    let delta = |x: usize, y: usize| i64::from(x == y);
    let base = 2 - delta(k, 2);
    indices
        .iter()
        .enumerate()
        .map(|(j, &rj)| {
            let shared: i64 = indices[..j]
                .iter()
                .map(|&rm| {
                    let d = rm.abs_diff(rj);
                    delta(d, 2) + delta(d, k.wrapping_sub(2))
                })
                .sum();
            u32::try_from(base - shared).map_err(|_| {
                Error::invalid(
                    "indices",
                    format!("negative exponent at position {}", j + 1),
                )
            })
        })
        .collect()
}

/// Every ordered admissible `n`-tuple of `[k]`, in lexicographic order.
pub fn enumerate_admissible_tuples(k: usize, n: usize) -> Result<Vec<AdmissibleTuple>> {
    check_size(k, n)?;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    extend(k, n, &mut current, &mut out)?;
    Ok(out)
}

fn extend(
    k: usize,
    n: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<AdmissibleTuple>,
) -> Result<()> {
    if current.len() == n {
        out.push(AdmissibleTuple::new(k, current.clone())?);
        return Ok(());
    }
    for r in 1..=k {
        if current.iter().all(|&c| cyclic_distance(c, r, k) >= 2) {
            current.push(r);
            extend(k, n, current, out)?;
            current.pop();
        }
    }
    Ok(())
}

/// All admissible tuples for every `n` in `1..=⌊k/2⌋`, in order of `n`.
pub fn all_admissible_tuples(k: usize) -> Result<Vec<AdmissibleTuple>> {
    let mut out = Vec::new();
    for n in 1..=k / 2 {
        out.extend(enumerate_admissible_tuples(k, n)?);
    }
    Ok(out)
}

fn binomial(n: u64, r: u64) -> u64 {
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of size-`n` independent sets of `C_k`: `k/(k-n) · C(k-n, n)`.
pub fn count_admissible_subsets(k: usize, n: usize) -> Result<u64> {
    check_size(k, n)?;
    let (k, n) = (k as u64, n as u64);
    Ok(k * binomial(k - n, n) / (k - n))
}

/// Filter all `2^k` subsets of `[k]` by the nonconsecutive predicate,
/// grouped by size. The empty set is omitted.
pub fn brute_force_admissible_subsets(k: usize) -> Result<BTreeMap<usize, Vec<Vec<usize>>>> {
    if !(2..=BRUTE_FORCE_MAX_K).contains(&k) {
        return Err(Error::invalid(
            "k",
            format!("brute force needs 2 <= k <= {BRUTE_FORCE_MAX_K}, got {k}"),
        ));
    }
    let mut by_size: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for mask in 1u32..(1 << k) {
        let subset: Vec<usize> = (0..k)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| b + 1)
            .collect();
        if is_admissible(k, &subset) {
            by_size.entry(subset.len()).or_default().push(subset);
        }
    }
    for subsets in by_size.values_mut() {
        subsets.sort();
    }
    Ok(by_size)
}
