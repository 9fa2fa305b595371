//! Subset combinatorics shared by the coding, adversary and diamond modules.
//!
//! All enumerations are in colexicographic order so that schedules, witnesses
//! and search results are reproducible across runs and platforms.

/// Binomial coefficient C(n, k) as u128, saturating at `u128::MAX` (every
/// caller only compares against small enumeration limits); 0 when `k > n`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i + 1) as u128,
            None => return u128::MAX,
        }
    }
    acc
}

/// Iterator over all k-subsets of `{0, .., n-1}` in colexicographic order.
///
/// Colex compares subsets by their largest differing element, so e.g. for
/// n=4, k=2: {0,1}, {0,2}, {1,2}, {0,3}, {1,3}, {2,3}.
pub struct ColexSubsets {
    n: usize,
    k: usize,
    cur: Option<Vec<usize>>,
}

pub fn colex_subsets(n: usize, k: usize) -> ColexSubsets {
    let cur = if k <= n { Some((0..k).collect()) } else { None };
    ColexSubsets { n, k, cur }
}

impl Iterator for ColexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.cur.as_mut()?;
        let item = cur.clone();
        // Advance: bump the smallest element that has room before its
        // successor (or before n for the last element), reset the prefix.
        let mut advanced = false;
        for i in 0..self.k {
            let limit = if i + 1 < self.k { cur[i + 1] } else { self.n };
            if cur[i] + 1 < limit {
                cur[i] += 1;
                for (j, slot) in cur.iter_mut().enumerate().take(i) {
                    *slot = j;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.cur = None;
        }
        Some(item)
    }
}

/// A uniformly random k-subset of `{0, .., n-1}`, sorted ascending.
pub fn random_subset(rng: &mut crate::rng::SplitMix64, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.below((n - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut picked = pool[..k].to_vec();
    picked.sort_unstable();
    picked
}
