//! Batches of independent systems sharing one size.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{BatchError, SolveError};
use crate::pcr::pcr_solve;
use crate::scalar::Real;
use crate::system::TridiagonalSystem;
use crate::thomas::{thomas_interleaved, thomas_solve};
use crate::tiled::{thomas_pcr_solve, thomas_thomas_solve};

/// Memory order of the coefficient arrays of a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Layout {
    /// System `s`, row `i` at `s * n + i`.
    SystemMajor,
    /// System `s`, row `i` at `i * count + s`.
    Interleaved,
}

/// Solver selection for batched and line solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Algorithm {
    Thomas,
    Pcr,
    ThomasThomas { tiles: usize },
    ThomasPcr { tiles: usize },
}

impl Algorithm {
    /// Solves one system with this algorithm.
    pub fn solve<T: Real>(self, sys: &TridiagonalSystem<T>) -> Result<Vec<T>, SolveError> {
        match self {
            Algorithm::Thomas => thomas_solve(sys),
            Algorithm::Pcr => pcr_solve(sys),
            Algorithm::ThomasThomas { tiles } => thomas_thomas_solve(sys, tiles),
            Algorithm::ThomasPcr { tiles } => thomas_pcr_solve(sys, tiles),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Thomas => "thomas",
            Algorithm::Pcr => "pcr",
            Algorithm::ThomasThomas { .. } => "thomas-thomas",
            Algorithm::ThomasPcr { .. } => "thomas-pcr",
        }
    }
}

/// `B` systems of size `n` in one contiguous allocation per coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalBatch<T> {
    count: usize,
    n: usize,
    layout: Layout,
    a: Vec<T>,
    b: Vec<T>,
    c: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> TridiagonalBatch<T> {
    /// Builds a batch from raw arrays already in `layout` order.
    #[allow(clippy::too_many_arguments)]
    pub fn from_raw(
        count: usize,
        n: usize,
        layout: Layout,
        a: Vec<T>,
        b: Vec<T>,
        c: Vec<T>,
        d: Vec<T>,
    ) -> Result<Self, SolveError> {
        if count == 0 || n == 0 {
            return Err(SolveError::Empty);
        }
        let len = count * n;
        for v in [&a, &b, &c, &d] {
            if v.len() != len {
                return Err(SolveError::LengthMismatch {
                    expected: len,
                    found: v.len(),
                });
            }
        }
        let batch = Self {
            count,
            n,
            layout,
            a,
            b,
            c,
            d,
        };
        for s in 0..count {
            if batch.a[batch.index(s, 0)] != T::ZERO || batch.c[batch.index(s, n - 1)] != T::ZERO {
                return Err(SolveError::BoundaryCoefficient);
            }
        }
        Ok(batch)
    }

    pub fn from_systems(systems: &[TridiagonalSystem<T>], layout: Layout) -> Result<Self, SolveError> {
        let count = systems.len();
        if count == 0 {
            return Err(SolveError::Empty);
        }
        let n = systems[0].len();
        let mut a = vec![T::ZERO; count * n];
        let mut b = a.clone();
        let mut c = a.clone();
        let mut d = a.clone();
        for (s, sys) in systems.iter().enumerate() {
            if sys.len() != n {
                return Err(SolveError::LengthMismatch {
                    expected: n,
                    found: sys.len(),
                });
            }
            for i in 0..n {
                let k = match layout {
                    Layout::SystemMajor => s * n + i,
                    Layout::Interleaved => i * count + s,
                };
                a[k] = sys.a()[i];
                b[k] = sys.b()[i];
                c[k] = sys.c()[i];
                d[k] = sys.d()[i];
            }
        }
        Ok(Self {
            count,
            n,
            layout,
            a,
            b,
            c,
            d,
        })
    }

    #[inline]
    fn index(&self, s: usize, i: usize) -> usize {
        match self.layout {
            Layout::SystemMajor => s * self.n + i,
            Layout::Interleaved => i * self.count + s,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }
    pub fn system_len(&self) -> usize {
        self.n
    }
    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Raw coefficient arrays `(a, b, c, d)` in the batch's layout.
    pub fn raw(&self) -> (&[T], &[T], &[T], &[T]) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    /// Copies system `s` out of the batch.
    pub fn system(&self, s: usize) -> TridiagonalSystem<T> {
        assert!(s < self.count, "system index out of range");
        let pick = |v: &[T]| (0..self.n).map(|i| v[self.index(s, i)]).collect::<Vec<T>>();
        TridiagonalSystem::new(pick(&self.a), pick(&self.b), pick(&self.c), pick(&self.d))
            .expect("batch invariants guarantee a valid system")
    }

    /// Re-lays the batch out in `layout`.
    pub fn to_layout(&self, layout: Layout) -> Self {
        if layout == self.layout {
            return self.clone();
        }
        let systems: Vec<_> = (0..self.count).map(|s| self.system(s)).collect();
        Self::from_systems(&systems, layout).expect("systems come from a valid batch")
    }
}

/// Per-system outcome of a batched solve, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSolution<T> {
    pub results: Vec<Result<Vec<T>, SolveError>>,
}

impl<T> BatchSolution<T> {
    pub fn failures(&self) -> impl Iterator<Item = BatchError> + '_ {
        self.results.iter().enumerate().filter_map(|(s, r)| {
            r.as_ref().err().map(|e| BatchError {
                system: s,
                source: e.clone(),
            })
        })
    }

    /// All solutions, or the first failure.
    pub fn into_result(self) -> Result<Vec<Vec<T>>, BatchError> {
        self.results
            .into_iter()
            .enumerate()
            .map(|(s, r)| r.map_err(|source| BatchError { system: s, source }))
            .collect()
    }
}

/// Options for [`batch_solve`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BatchOptions {
    /// Stop at the first failing system; later systems are not attempted.
    pub fail_fast: bool,
    /// Reject systems that are not strictly diagonally dominant.
    pub check_dominance: bool,
}

/// Solves every system in the batch independently.
///
/// Interleaved batches solved with Thomas run through the lane kernel, which
/// produces the same bits as the scalar solver.
pub fn batch_solve<T: Real>(
    batch: &TridiagonalBatch<T>,
    algo: Algorithm,
    opts: BatchOptions,
) -> BatchSolution<T> {
    if opts.check_dominance || opts.fail_fast || algo != Algorithm::Thomas || batch.layout == Layout::SystemMajor {
        return solve_each(batch, algo, opts);
    }

    let (n, count) = (batch.n, batch.count);
    let mut d = batch.d.clone();
    let mut scratch = vec![T::ZERO; n * count];
    let mut failures = vec![None; count];
    thomas_interleaved(n, count, 8, &batch.a, &batch.b, &batch.c, &mut d, &mut scratch, &mut failures);
    let results = failures
        .iter()
        .enumerate()
        .map(|(s, f)| match f {
            Some(index) => Err(SolveError::ZeroPivot { index: *index }),
            None => Ok((0..n).map(|i| d[i * count + s]).collect()),
        })
        .collect();
    BatchSolution { results }
}

fn solve_each<T: Real>(
    batch: &TridiagonalBatch<T>,
    algo: Algorithm,
    opts: BatchOptions,
) -> BatchSolution<T> {
    let mut results = Vec::with_capacity(batch.count);
    for s in 0..batch.count {
        let sys = batch.system(s);
        let r = if opts.check_dominance {
            sys.check_diagonal_dominance().and_then(|_| algo.solve(&sys))
        } else {
            algo.solve(&sys)
        };
        let failed = r.is_err();
        results.push(r);
        if failed && opts.fail_fast {
            break;
        }
    }
    BatchSolution { results }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial() -> TridiagonalSystem<f64> {
        TridiagonalSystem::new(vec![0.0; 3], vec![2.0; 3], vec![0.0; 3], vec![2.0, 4.0, 6.0]).unwrap()
    }

    #[test]
    fn copies_of_trivial_system() {
        for layout in [Layout::SystemMajor, Layout::Interleaved] {
            let batch = TridiagonalBatch::from_systems(&[trivial(), trivial(), trivial()], layout).unwrap();
            let out = batch_solve(&batch, Algorithm::Thomas, BatchOptions::default())
                .into_result()
                .unwrap();
            assert_eq!(out, vec![vec![1.0, 2.0, 3.0]; 3]);
        }
    }

    #[test]
    fn layouts_round_trip() {
        let sys = vec![
            trivial(),
            TridiagonalSystem::new(vec![0.0, 1.0, 1.0], vec![3.0; 3], vec![1.0, 1.0, 0.0], vec![1.0; 3])
                .unwrap(),
        ];
        let sm = TridiagonalBatch::from_systems(&sys, Layout::SystemMajor).unwrap();
        let il = sm.to_layout(Layout::Interleaved);
        assert_eq!(il.system(1), sys[1]);
        assert_eq!(il.to_layout(Layout::SystemMajor), sm);
    }

    #[test]
    fn failure_does_not_abort_others() {
        let bad = TridiagonalSystem::new(vec![0.0; 3], vec![0.0, 1.0, 1.0], vec![0.0; 3], vec![1.0; 3])
            .unwrap();
        for layout in [Layout::SystemMajor, Layout::Interleaved] {
            let batch = TridiagonalBatch::from_systems(&[trivial(), bad.clone(), trivial()], layout).unwrap();
            let sol = batch_solve(&batch, Algorithm::Thomas, BatchOptions::default());
            assert_eq!(sol.results.len(), 3);
            assert_eq!(sol.results[2].as_ref().unwrap(), &vec![1.0, 2.0, 3.0]);
            let failures: Vec<_> = sol.failures().collect();
            assert_eq!(
                failures,
                vec![BatchError {
                    system: 1,
                    source: SolveError::ZeroPivot { index: 0 }
                }]
            );
        }
    }

    #[test]
    fn fail_fast_stops() {
        let bad = TridiagonalSystem::new(vec![0.0; 3], vec![0.0, 1.0, 1.0], vec![0.0; 3], vec![1.0; 3])
            .unwrap();
        let batch = TridiagonalBatch::from_systems(&[bad, trivial()], Layout::Interleaved).unwrap();
        let sol = batch_solve(
            &batch,
            Algorithm::Pcr,
            BatchOptions {
                fail_fast: true,
                ..Default::default()
            },
        );
        assert_eq!(sol.results.len(), 1);
        assert_eq!(sol.into_result().unwrap_err().system, 0);
    }

    #[test]
    fn dominance_flag() {
        let weak = TridiagonalSystem::new(vec![0.0, 1.0], vec![1.0, 1.0], vec![1.0, 0.0], vec![1.0; 2])
            .unwrap();
        let batch = TridiagonalBatch::from_systems(&[weak], Layout::SystemMajor).unwrap();
        let sol = batch_solve(
            &batch,
            Algorithm::Thomas,
            BatchOptions {
                check_dominance: true,
                ..Default::default()
            },
        );
        assert_eq!(
            sol.results[0],
            Err(SolveError::NotDiagonallyDominant { index: 0 })
        );
    }

    #[test]
    fn raw_construction_checks_corners() {
        assert_eq!(
            TridiagonalBatch::from_raw(
                1,
                2,
                Layout::SystemMajor,
                vec![1.0, 0.0],
                vec![1.0; 2],
                vec![0.0; 2],
                vec![0.0; 2]
            ),
            Err(SolveError::BoundaryCoefficient)
        );
        assert_eq!(
            TridiagonalBatch::<f64>::from_raw(0, 2, Layout::SystemMajor, vec![], vec![], vec![], vec![]),
            Err(SolveError::Empty)
        );
    }
}
