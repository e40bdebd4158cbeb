//! Tiled solvers for large systems.
//!
//! A system of size `n` is cut into `t` tiles of `m = ⌈n/t⌉` rows (the last
//! tile takes the remainder). Inside a tile a modified Thomas sweep expresses
//! every interior unknown through the tile's first and last unknowns:
//!
//! ```text
//! u_i + a*_i u_0 + c*_i u_{M-1} = d*_i,   0 < i < M-1
//! ```
//!
//! The first and last row of each tile then form a tridiagonal system of size
//! `2t` in the unknowns `[u_0^0, u_{M-1}^0, u_0^1, u_{M-1}^1, ...]`. Once it is
//! solved (by Thomas or PCR) the interior unknowns follow directly.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::SolveError;
use crate::pcr::pcr_solve;
use crate::scalar::Real;
use crate::system::TridiagonalSystem;
use crate::thomas::thomas_solve;

/// How a system of size `n` is split into tiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TilePlan {
    n: usize,
    tiles: usize,
    tile_size: usize,
}

impl TilePlan {
    /// Every tile, including the shorter last one, needs at least 3 rows.
    pub const MIN_TILE: usize = 3;

    pub fn new(n: usize, tiles: usize) -> Result<Self, SolveError> {
        let invalid = |reason| SolveError::InvalidTilePlan { n, tiles, reason };
        if tiles < 2 {
            return Err(invalid("need at least 2 tiles"));
        }
        let tile_size = n.div_ceil(tiles);
        if tile_size < Self::MIN_TILE {
            return Err(invalid("tile size below 3"));
        }
        // (t-1)·m < n  and  n - (t-1)·m >= 3
        let covered = (tiles - 1) * tile_size;
        if covered >= n || n - covered < Self::MIN_TILE {
            return Err(invalid("last tile has fewer than 3 rows"));
        }
        Ok(Self {
            n,
            tiles,
            tile_size,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn tiles(&self) -> usize {
        self.tiles
    }
    /// Nominal tile size `m = ⌈n/t⌉`.
    pub fn tile_size(&self) -> usize {
        self.tile_size
    }
    pub fn reduced_size(&self) -> usize {
        2 * self.tiles
    }

    /// Row range `[start, end)` of tile `k`.
    pub fn tile_range(&self, k: usize) -> core::ops::Range<usize> {
        let start = k * self.tile_size;
        let end = if k + 1 == self.tiles {
            self.n
        } else {
            start + self.tile_size
        };
        start..end
    }
}

/// One row of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedRow<T> {
    pub lower: T,
    pub diag: T,
    pub upper: T,
    pub rhs: T,
}

/// Output of the modified Thomas phase on one tile.
///
/// `a_star`, `c_star`, `d_star` have the tile's length; entries 0 and `M-1`
/// are zero because those unknowns are solved in the reduced system.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedTileResult<T> {
    pub a_star: Vec<T>,
    pub c_star: Vec<T>,
    pub d_star: Vec<T>,
    /// Equation for `u_0`: couples the previous tile's last unknown (`lower`)
    /// and this tile's last unknown (`upper`).
    pub first: ReducedRow<T>,
    /// Equation for `u_{M-1}`: couples this tile's first unknown (`lower`)
    /// and the next tile's first unknown (`upper`).
    pub last: ReducedRow<T>,
}

impl<T> ModifiedTileResult<T> {
    pub fn len(&self) -> usize {
        self.d_star.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_star.is_empty()
    }
}

/// Runs the forward and backward sweep of the modified Thomas algorithm over
/// one tile. `a[0]` couples to the previous tile and `c[m-1]` to the next.
pub fn modified_thomas_phase<T: Real>(
    a: &[T],
    b: &[T],
    c: &[T],
    d: &[T],
) -> Result<ModifiedTileResult<T>, SolveError> {
    let m = b.len();
    if m < TilePlan::MIN_TILE {
        return Err(SolveError::MismatchedTiles("tile shorter than 3 rows"));
    }
    for v in [a, c, d] {
        if v.len() != m {
            return Err(SolveError::LengthMismatch {
                expected: m,
                found: v.len(),
            });
        }
    }

    // forward: u_i + a'_i u_0 + c'_i u_{i+1} = d'_i for i = 1..m-1
    let mut ap = vec![T::ZERO; m];
    let mut cp = vec![T::ZERO; m];
    let mut dp = vec![T::ZERO; m];
    if b[1].is_negligible_pivot() {
        return Err(SolveError::ZeroPivot { index: 1 });
    }
    ap[1] = a[1] / b[1];
    cp[1] = c[1] / b[1];
    dp[1] = d[1] / b[1];
    for i in 2..m {
        let den = b[i] - a[i] * cp[i - 1];
        if den.is_negligible_pivot() {
            return Err(SolveError::ZeroPivot { index: i });
        }
        let r = T::ONE / den;
        dp[i] = r * (d[i] - a[i] * dp[i - 1]);
        ap[i] = -(r * (a[i] * ap[i - 1]));
        cp[i] = r * c[i];
    }
    let last = ReducedRow {
        lower: ap[m - 1],
        diag: T::ONE,
        upper: cp[m - 1],
        rhs: dp[m - 1],
    };

    // backward: u_i + a*_i u_0 + c*_i u_{m-1} = d*_i for i = m-2..1
    let mut a_star = vec![T::ZERO; m];
    let mut c_star = vec![T::ZERO; m];
    let mut d_star = vec![T::ZERO; m];
    a_star[m - 2] = ap[m - 2];
    c_star[m - 2] = cp[m - 2];
    d_star[m - 2] = dp[m - 2];
    for i in (1..m - 2).rev() {
        d_star[i] = dp[i] - cp[i] * d_star[i + 1];
        a_star[i] = ap[i] - cp[i] * a_star[i + 1];
        c_star[i] = -(cp[i] * c_star[i + 1]);
    }

    // row 0 with u_1 eliminated
    let first = ReducedRow {
        lower: a[0],
        diag: b[0] - c[0] * a_star[1],
        upper: -(c[0] * c_star[1]),
        rhs: d[0] - c[0] * d_star[1],
    };

    Ok(ModifiedTileResult {
        a_star,
        c_star,
        d_star,
        first,
        last,
    })
}

/// Stacks the boundary rows of consecutive tiles into the reduced system of
/// size `2t`.
pub fn assemble_reduced<T: Real>(
    tiles: &[ModifiedTileResult<T>],
) -> Result<TridiagonalSystem<T>, SolveError> {
    if tiles.len() < 2 {
        return Err(SolveError::MismatchedTiles("need at least 2 tiles"));
    }
    let size = 2 * tiles.len();
    let mut a = Vec::with_capacity(size);
    let mut b = Vec::with_capacity(size);
    let mut c = Vec::with_capacity(size);
    let mut d = Vec::with_capacity(size);
    for (k, tile) in tiles.iter().enumerate() {
        if tile.len() < TilePlan::MIN_TILE
            || tile.a_star.len() != tile.len()
            || tile.c_star.len() != tile.len()
        {
            return Err(SolveError::MismatchedTiles("tile vectors have inconsistent lengths"));
        }
        if k == 0 && tile.first.lower != T::ZERO {
            return Err(SolveError::MismatchedTiles("first tile couples to a previous tile"));
        }
        if k + 1 == tiles.len() && tile.last.upper != T::ZERO {
            return Err(SolveError::MismatchedTiles("last tile couples to a next tile"));
        }
        for row in [tile.first, tile.last] {
            a.push(row.lower);
            b.push(row.diag);
            c.push(row.upper);
            d.push(row.rhs);
        }
    }
    TridiagonalSystem::new(a, b, c, d)
}

/// Recovers the full solution from the per-tile results and the reduced
/// solution `[u_0^0, u_{M-1}^0, u_0^1, ...]`.
pub fn back_substitute<T: Real>(
    tiles: &[ModifiedTileResult<T>],
    boundary: &[T],
) -> Result<Vec<T>, SolveError> {
    if boundary.len() != 2 * tiles.len() {
        return Err(SolveError::LengthMismatch {
            expected: 2 * tiles.len(),
            found: boundary.len(),
        });
    }
    let n: usize = tiles.iter().map(ModifiedTileResult::len).sum();
    let mut u = Vec::with_capacity(n);
    for (k, tile) in tiles.iter().enumerate() {
        let m = tile.len();
        let u0 = boundary[2 * k];
        let um = boundary[2 * k + 1];
        u.push(u0);
        for i in 1..m - 1 {
            u.push(tile.d_star[i] - tile.a_star[i] * u0 - tile.c_star[i] * um);
        }
        u.push(um);
    }
    Ok(u)
}

/// Solver used for the reduced system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ReducedSolver {
    Thomas,
    Pcr,
}

/// Modified Thomas over every tile, reduced solve, back substitution.
pub fn tiled_solve<T: Real>(
    sys: &TridiagonalSystem<T>,
    tiles: usize,
    reduced: ReducedSolver,
) -> Result<Vec<T>, SolveError> {
    let plan = TilePlan::new(sys.len(), tiles)?;
    let results = (0..plan.tiles())
        .map(|k| {
            let r = plan.tile_range(k);
            let offset = r.start;
            modified_thomas_phase(
                &sys.a()[r.clone()],
                &sys.b()[r.clone()],
                &sys.c()[r.clone()],
                &sys.d()[r],
            )
            .map_err(|e| shift_index(e, offset))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let reduced_sys = assemble_reduced(&results)?;
    let boundary = match reduced {
        ReducedSolver::Thomas => thomas_solve(&reduced_sys),
        ReducedSolver::Pcr => pcr_solve(&reduced_sys),
    }
    .map_err(|e| match e {
        // reduced row index -> original row index
        SolveError::ZeroPivot { index } => {
            let r = plan.tile_range(index / 2);
            SolveError::ZeroPivot {
                index: if index % 2 == 0 { r.start } else { r.end - 1 },
            }
        }
        other => other,
    })?;
    back_substitute(&results, &boundary)
}

pub fn thomas_thomas_solve<T: Real>(
    sys: &TridiagonalSystem<T>,
    tiles: usize,
) -> Result<Vec<T>, SolveError> {
    tiled_solve(sys, tiles, ReducedSolver::Thomas)
}

pub fn thomas_pcr_solve<T: Real>(
    sys: &TridiagonalSystem<T>,
    tiles: usize,
) -> Result<Vec<T>, SolveError> {
    tiled_solve(sys, tiles, ReducedSolver::Pcr)
}

fn shift_index(e: SolveError, offset: usize) -> SolveError {
    match e {
        SolveError::ZeroPivot { index } => SolveError::ZeroPivot {
            index: index + offset,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_validation() {
        assert!(TilePlan::new(6, 2).is_ok());
        assert!(TilePlan::new(256, 4).is_ok());
        assert!(matches!(
            TilePlan::new(12, 1),
            Err(SolveError::InvalidTilePlan { .. })
        ));
        assert!(matches!(
            TilePlan::new(5, 2),
            Err(SolveError::InvalidTilePlan { .. })
        ));
        // m = 3 but the last tile would only hold 2 rows
        assert!(matches!(
            TilePlan::new(8, 3),
            Err(SolveError::InvalidTilePlan { .. })
        ));
        assert!(TilePlan::new(10, 3).is_err());
        let p = TilePlan::new(13, 3).unwrap();
        assert_eq!(p.tile_size(), 5);
        assert_eq!(p.tile_range(2), 10..13);
        assert!(TilePlan::new(11, 3).is_ok());
        assert_eq!(TilePlan::new(11, 3).unwrap().tile_range(2), 8..11);
    }

    #[test]
    fn plan_ranges_cover_system() {
        for n in 6..200 {
            for t in 2..20 {
                if let Ok(p) = TilePlan::new(n, t) {
                    assert_eq!(p.reduced_size(), 2 * t);
                    assert!(p.tile_size() * t >= n);
                    let mut next = 0;
                    for k in 0..t {
                        let r = p.tile_range(k);
                        assert_eq!(r.start, next);
                        assert!(r.len() >= 3);
                        next = r.end;
                    }
                    assert_eq!(next, n);
                }
            }
        }
    }

    #[test]
    fn identity_tile() {
        let d = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = modified_thomas_phase(&[0.0; 5], &[1.0; 5], &[0.0; 5], &d).unwrap();
        assert_eq!(&r.d_star[1..4], &d[1..4]);
        assert!(r.a_star.iter().chain(&r.c_star).all(|&v| v == 0.0));
        assert_eq!(
            r.first,
            ReducedRow {
                lower: 0.0,
                diag: 1.0,
                upper: 0.0,
                rhs: 1.0
            }
        );
        assert_eq!(
            r.last,
            ReducedRow {
                lower: 0.0,
                diag: 1.0,
                upper: 0.0,
                rhs: 5.0
            }
        );
    }

    #[test]
    fn identity_system_through_reduced() {
        let d: Vec<f64> = (0..9).map(|i| i as f64 * 1.5 - 2.0).collect();
        let sys = TridiagonalSystem::identity(d.clone()).unwrap();
        let plan = TilePlan::new(9, 3).unwrap();
        let tiles: Vec<_> = (0..3)
            .map(|k| {
                let r = plan.tile_range(k);
                modified_thomas_phase(
                    &sys.a()[r.clone()],
                    &sys.b()[r.clone()],
                    &sys.c()[r.clone()],
                    &sys.d()[r],
                )
                .unwrap()
            })
            .collect();
        let reduced = assemble_reduced(&tiles).unwrap();
        assert!(reduced.a().iter().chain(reduced.c()).all(|&v| v == 0.0));
        assert!(reduced.b().iter().all(|&v| v == 1.0));
        assert_eq!(reduced.d(), &[d[0], d[2], d[3], d[5], d[6], d[8]]);
        let u = back_substitute(&tiles, reduced.d()).unwrap();
        assert_eq!(u, d);
        assert_eq!(thomas_thomas_solve(&sys, 3).unwrap(), d);
        assert_eq!(thomas_pcr_solve(&sys, 3).unwrap(), d);
    }

    #[test]
    fn minimal_reduced_system_has_corner_zeros() {
        let sys = TridiagonalSystem::new(
            vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            vec![4.0; 6],
            vec![1.0, 1.0, 1.0, 1.0, 1.0, 0.0],
            vec![1.0; 6],
        )
        .unwrap();
        let plan = TilePlan::new(6, 2).unwrap();
        let tiles: Vec<_> = (0..2)
            .map(|k| {
                let r = plan.tile_range(k);
                modified_thomas_phase(
                    &sys.a()[r.clone()],
                    &sys.b()[r.clone()],
                    &sys.c()[r.clone()],
                    &sys.d()[r],
                )
                .unwrap()
            })
            .collect();
        let reduced = assemble_reduced(&tiles).unwrap();
        assert_eq!(reduced.len(), 4);
        assert_eq!(reduced.a()[0], 0.0);
        assert_eq!(reduced.c()[3], 0.0);
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let sys = TridiagonalSystem::new(
            vec![0.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0],
            vec![3.0; 7],
            vec![-1.0, -1.0, -1.0, -1.0, -1.0, -1.0, 0.0],
            vec![0.0; 7],
        )
        .unwrap();
        assert!(thomas_thomas_solve(&sys, 2).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tile_phase_is_pure() {
        let a = [0.3, -0.2, 0.5, 0.1];
        let b = [3.0, 2.5, 4.0, 3.5];
        let c = [0.4, 0.6, -0.3, 0.2];
        let d = [1.0, -2.0, 0.5, 4.0];
        let first = modified_thomas_phase(&a, &b, &c, &d).unwrap();
        let second = modified_thomas_phase(&a, &b, &c, &d).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn errors() {
        let sys = TridiagonalSystem::identity(vec![1.0; 5]).unwrap();
        assert!(matches!(
            thomas_pcr_solve(&sys, 1),
            Err(SolveError::InvalidTilePlan { .. })
        ));
        assert!(matches!(
            back_substitute::<f64>(&[], &[1.0]),
            Err(SolveError::LengthMismatch { .. })
        ));
        assert!(matches!(
            assemble_reduced::<f64>(&[]),
            Err(SolveError::MismatchedTiles(_))
        ));
    }
}
