//! Set-cover solvers over orphanages: a greedy heuristic and an exact
//! branch-and-bound that also answers the bounded decision question.

use super::CoverageError;

/// Largest orphanage family the exact solver accepts by default.
pub const DEFAULT_EXACT_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Self::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn from_indices(n: usize, idx: &[usize]) -> Self {
        let mut b = Self::empty(n);
        for &i in idx {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn overlap(&self, other: &Bits) -> usize {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    fn remove(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, w)| **w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| k * 64 + b))
    }
}

fn check_feasible(universe: usize, sets: &[Vec<usize>]) -> Result<Vec<Bits>, CoverageError> {
    let bits: Vec<Bits> = sets.iter().map(|s| Bits::from_indices(universe, s)).collect();
    let mut left = Bits::full(universe);
    for b in &bits {
        left.remove(b);
    }
    match left.first() {
        None => Ok(bits),
        Some(missing) => Err(CoverageError::Infeasible { uncovered: missing }),
    }
}

/// Greedy cover: repeatedly take the set covering the most uncovered
/// elements. Ties go to the earliest set, so callers that pass sets in
/// lexicographic order get the lexicographically smallest one.
pub fn greedy_cover_indices(universe: usize, sets: &[Vec<usize>]) -> Result<Vec<usize>, CoverageError> {
    let bits = check_feasible(universe, sets)?;
    let mut left = Bits::full(universe);
    let mut chosen = Vec::new();
    while !left.is_empty() {
        let (best, _) = bits
            .iter()
            .enumerate()
            .map(|(k, b)| (k, b.overlap(&left)))
            .fold((usize::MAX, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        left.remove(&bits[best]);
        chosen.push(best);
    }
    Ok(chosen)
}

struct Search<'a> {
    bits: &'a [Bits],
    best: Vec<usize>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, left: &Bits) {
        if left.is_empty() {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        let remaining = left.count();
        let widest = self.bits.iter().map(|b| b.overlap(left)).max().unwrap_or(0);
        if widest == 0 {
            return;
        }
        if self.chosen.len() + remaining.div_ceil(widest) >= self.best.len() {
            return;
        }
        // branch on the uncovered element with the fewest covering sets
        let pivot = left.ones().min_by_key(|&e| self.bits.iter().filter(|b| b.get(e)).count()).expect("non-empty");
        let mut options: Vec<(usize, usize)> =
            self.bits.iter().enumerate().filter(|(_, b)| b.get(pivot)).map(|(k, b)| (k, b.overlap(left))).collect();
        options.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (k, _) in options {
            let mut next = left.clone();
            next.remove(&self.bits[k]);
            self.chosen.push(k);
            self.run(&next);
            self.chosen.pop();
        }
    }
}

/// Minimum-cardinality cover. With `budget = Some(k)` a minimum above `k`
/// is reported as infeasible.
pub fn exact_cover_indices(
    universe: usize,
    sets: &[Vec<usize>],
    budget: Option<usize>,
    limit: usize,
) -> Result<Vec<usize>, CoverageError> {
    if sets.len() > limit {
        return Err(CoverageError::LimitExceeded { size: sets.len(), limit });
    }
    let bits = check_feasible(universe, sets)?;
    let seed = greedy_cover_indices(universe, sets)?;
    let mut search = Search { bits: &bits, best: seed, chosen: Vec::new() };
    search.run(&Bits::full(universe));
    let mut best = search.best;
    best.sort_unstable();
    match budget {
        Some(k) if best.len() > k => Err(CoverageError::OverBudget { minimum: best.len(), budget: k }),
        _ => Ok(best),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_prefers_the_widest_set() {
        let sets = vec![vec![0], vec![0, 1, 2], vec![1], vec![2]];
        assert_eq!(greedy_cover_indices(3, &sets).unwrap(), vec![1]);
        assert_eq!(exact_cover_indices(3, &sets, Some(1), 24).unwrap(), vec![1]);
    }

    #[test]
    fn singletons_need_one_set_each() {
        let sets = vec![vec![0], vec![1], vec![2]];
        assert_eq!(greedy_cover_indices(3, &sets).unwrap().len(), 3);
        assert_eq!(exact_cover_indices(3, &sets, None, 24).unwrap().len(), 3);
    }

    #[test]
    fn pairwise_sets_need_two() {
        // brute force: no single set covers {0,1,2}; {0,1}+{1,2} does
        let sets = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        assert_eq!(greedy_cover_indices(3, &sets).unwrap().len(), 2);
        assert_eq!(exact_cover_indices(3, &sets, None, 24).unwrap().len(), 2);
        assert!(matches!(
            exact_cover_indices(3, &sets, Some(1), 24),
            Err(CoverageError::OverBudget { minimum: 2, budget: 1 })
        ));
    }

    #[test]
    fn zero_budget_is_infeasible_for_nonempty_universe() {
        let sets = vec![vec![0]];
        assert!(exact_cover_indices(1, &sets, Some(0), 24).is_err());
        assert_eq!(exact_cover_indices(0, &[], Some(0), 24).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn uncoverable_element_and_limit() {
        assert!(matches!(greedy_cover_indices(2, &[vec![0]]), Err(CoverageError::Infeasible { uncovered: 1 })));
        let many: Vec<Vec<usize>> = (0..30).map(|i| vec![i]).collect();
        assert!(matches!(
            exact_cover_indices(30, &many, None, DEFAULT_EXACT_LIMIT),
            Err(CoverageError::LimitExceeded { size: 30, limit: 24 })
        ));
    }

    #[test]
    fn greedy_is_not_always_optimal() {
        let sets = vec![vec![0, 2, 4], vec![0, 1, 2], vec![3, 4, 5], vec![1, 3], vec![5]];
        let g = greedy_cover_indices(6, &sets).unwrap();
        let e = exact_cover_indices(6, &sets, None, 24).unwrap();
        assert_eq!(e, vec![1, 2]);
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn wide_universe_crosses_word_boundaries() {
        let sets = vec![(0..70).collect::<Vec<_>>(), (60..130).collect(), (0..130).step_by(2).collect()];
        assert_eq!(exact_cover_indices(130, &sets, None, 24).unwrap(), vec![0, 1]);
    }
}
