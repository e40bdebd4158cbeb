//! Batched structured meshes and axis-wise line solves.
//!
//! Storage is x-contiguous: point `(b, i, j, k)` lives at
//! `b·xyz + k·xy + j·x + i`. Solving along an axis turns every line of points
//! parallel to that axis into one tridiagonal system.
//!
//! Line numbering follows the memory order of the line start points:
//!
//! | axis | line `l` decomposes as        | base offset             | stride |
//! |------|-------------------------------|-------------------------|--------|
//! | X    | `((b·z) + k)·y + j`           | `b·xyz + k·xy + j·x`    | 1      |
//! | Y    | `((b·z) + k)·x + i`           | `b·xyz + k·xy + i`      | x      |
//! | Z    | `((b·y) + j)·x + i`           | `b·xyz + j·x + i`       | xy     |
//!
//! so consecutive Y and Z lines are adjacent in memory and X lines are read
//! as contiguous runs that need a transpose to be fed to independent solvers.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::batch::Algorithm;
use crate::error::SolveError;
use crate::scalar::Real;
use crate::system::TridiagonalSystem;
use crate::thomas::thomas_interleaved;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Mesh extents. A 2D mesh has `z == 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dims {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl Dims {
    pub const fn new(x: usize, y: usize, z: usize) -> Self {
        Self { x, y, z }
    }

    pub const fn planar(x: usize, y: usize) -> Self {
        Self { x, y, z: 1 }
    }

    pub const fn points(&self) -> usize {
        self.x * self.y * self.z
    }

    pub const fn is_planar(&self) -> bool {
        self.z == 1
    }

    pub const fn extent(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    /// Axes swept by an ADI step: x, y and, for 3D meshes, z.
    pub fn solved_axes(&self) -> &'static [Axis] {
        if self.is_planar() {
            &[Axis::X, Axis::Y]
        } else {
            &Axis::ALL
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeshError {
    #[error("mesh extents and batch must be positive")]
    ZeroExtent,
    #[error("data length {found} does not match {expected} points")]
    LengthMismatch { expected: usize, found: usize },
    #[error("mesh dimensions differ")]
    ShapeMismatch,
}

/// `batch` independent meshes of the same extents.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<T> {
    dims: Dims,
    batch: usize,
    data: Vec<T>,
}

impl<T: Real> Mesh<T> {
    pub fn zeros(dims: Dims, batch: usize) -> Result<Self, MeshError> {
        Self::filled(dims, batch, T::ZERO)
    }

    pub fn filled(dims: Dims, batch: usize, value: T) -> Result<Self, MeshError> {
        if dims.points() == 0 || batch == 0 {
            return Err(MeshError::ZeroExtent);
        }
        Ok(Self {
            dims,
            batch,
            data: vec![value; dims.points() * batch],
        })
    }

    pub fn from_vec(dims: Dims, batch: usize, data: Vec<T>) -> Result<Self, MeshError> {
        if dims.points() == 0 || batch == 0 {
            return Err(MeshError::ZeroExtent);
        }
        let expected = dims.points() * batch;
        if data.len() != expected {
            return Err(MeshError::LengthMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(Self { dims, batch, data })
    }

    /// Builds a mesh by evaluating `f(b, i, j, k)` at every point.
    pub fn from_fn(
        dims: Dims,
        batch: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> T,
    ) -> Result<Self, MeshError> {
        let mut m = Self::zeros(dims, batch)?;
        for b in 0..batch {
            for k in 0..dims.z {
                for j in 0..dims.y {
                    for i in 0..dims.x {
                        let o = m.offset(b, i, j, k);
                        m.data[o] = f(b, i, j, k);
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }
    pub fn batch(&self) -> usize {
        self.batch
    }
    pub fn data(&self) -> &[T] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }
    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn offset(&self, b: usize, i: usize, j: usize, k: usize) -> usize {
        let Dims { x, y, .. } = self.dims;
        b * self.dims.points() + k * x * y + j * x + i
    }

    #[inline]
    pub fn get(&self, b: usize, i: usize, j: usize, k: usize) -> T {
        self.data[self.offset(b, i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, b: usize, i: usize, j: usize, k: usize, v: T) {
        let o = self.offset(b, i, j, k);
        self.data[o] = v;
    }

    /// Splits the batch into single meshes.
    pub fn split_batch(self) -> Vec<Mesh<T>> {
        let points = self.dims.points();
        self.data
            .chunks(points)
            .map(|c| Mesh {
                dims: self.dims,
                batch: 1,
                data: c.to_vec(),
            })
            .collect()
    }

    /// Concatenates meshes of identical extents into one batch.
    pub fn stack(meshes: &[Mesh<T>]) -> Result<Self, MeshError> {
        let first = meshes.first().ok_or(MeshError::ZeroExtent)?;
        let dims = first.dims;
        let mut data = Vec::with_capacity(meshes.iter().map(|m| m.data.len()).sum());
        let mut batch = 0;
        for m in meshes {
            if m.dims != dims {
                return Err(MeshError::ShapeMismatch);
            }
            batch += m.batch;
            data.extend_from_slice(&m.data);
        }
        Ok(Self { dims, batch, data })
    }

    pub fn max_abs(&self) -> f64 {
        crate::scalar::max_norm(&self.data)
    }

    pub fn cast<U: Real>(&self) -> Mesh<U> {
        Mesh {
            dims: self.dims,
            batch: self.batch,
            data: self.data.iter().map(|v| U::from_f64(v.to_f64())).collect(),
        }
    }
}

/// One line of a mesh along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineRef {
    pub axis: Axis,
    /// Global line number across the whole batch.
    pub index: usize,
    /// Mesh within the batch.
    pub batch: usize,
    /// Line number within its mesh.
    pub local: usize,
    pub base: usize,
    pub stride: usize,
    pub len: usize,
}

impl LineRef {
    /// Storage offset of row `i` of the line.
    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.base + i * self.stride
    }
}

/// The set of lines along one axis of a batched mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineBatchView {
    pub axis: Axis,
    dims: Dims,
    batch: usize,
}

impl LineBatchView {
    pub fn new(dims: Dims, batch: usize, axis: Axis) -> Self {
        Self { axis, dims, batch }
    }

    /// Size of every system along the axis.
    pub fn system_len(&self) -> usize {
        self.dims.extent(self.axis)
    }

    pub fn lines_per_mesh(&self) -> usize {
        self.dims.points() / self.dims.extent(self.axis)
    }

    pub fn count(&self) -> usize {
        self.batch * self.lines_per_mesh()
    }

    pub fn stride(&self) -> usize {
        match self.axis {
            Axis::X => 1,
            Axis::Y => self.dims.x,
            Axis::Z => self.dims.x * self.dims.y,
        }
    }

    pub fn line(&self, index: usize) -> LineRef {
        debug_assert!(index < self.count());
        let Dims { x, y, .. } = self.dims;
        let per_mesh = self.lines_per_mesh();
        let batch = index / per_mesh;
        let local = index % per_mesh;
        let mesh_base = batch * self.dims.points();
        let base = match self.axis {
            // local = k·y + j
            Axis::X => mesh_base + local * x,
            // local = k·x + i
            Axis::Y => mesh_base + (local / x) * x * y + local % x,
            // local = j·x + i
            Axis::Z => mesh_base + local,
        };
        LineRef {
            axis: self.axis,
            index,
            batch,
            local,
            base,
            stride: self.stride(),
            len: self.system_len(),
        }
    }

    pub fn lines(&self) -> impl Iterator<Item = LineRef> + '_ {
        (0..self.count()).map(move |l| self.line(l))
    }
}

/// Copies every line along `axis` out of the mesh, in line order.
pub fn gather_lines<'a, T: Real>(mesh: &'a Mesh<T>, axis: Axis) -> impl Iterator<Item = Vec<T>> + 'a {
    let view = LineBatchView::new(mesh.dims, mesh.batch, axis);
    (0..view.count()).map(move |l| {
        let line = view.line(l);
        (0..line.len).map(|i| mesh.data[line.at(i)]).collect()
    })
}

/// Writes lines (in the order produced by [`gather_lines`]) back into the mesh.
pub fn scatter_lines<T: Real, L: AsRef<[T]>>(
    mesh: &mut Mesh<T>,
    axis: Axis,
    lines: impl IntoIterator<Item = L>,
) -> Result<(), MeshError> {
    let view = LineBatchView::new(mesh.dims, mesh.batch, axis);
    let mut written = 0;
    for (l, values) in lines.into_iter().enumerate() {
        let values = values.as_ref();
        if l >= view.count() || values.len() != view.system_len() {
            return Err(MeshError::LengthMismatch {
                expected: view.system_len(),
                found: values.len(),
            });
        }
        let line = view.line(l);
        for (i, v) in values.iter().enumerate() {
            mesh.data[line.at(i)] = *v;
        }
        written += 1;
    }
    if written != view.count() {
        return Err(MeshError::LengthMismatch {
            expected: view.count(),
            found: written,
        });
    }
    Ok(())
}

/// In-place transpose of a row-major `v × v` tile.
pub fn block_transpose<T: Copy>(tile: &mut [T], v: usize) {
    assert_eq!(tile.len(), v * v, "tile must be v×v");
    for r in 0..v {
        for c in r + 1..v {
            tile.swap(r * v + c, c * v + r);
        }
    }
}

/// Supplies the matrix coefficients of each line.
pub trait CoefficientSource<T> {
    /// Fills `a`, `b`, `c` (each of length `line.len`) for `line`.
    fn fill(&self, line: &LineRef, a: &mut [T], b: &mut [T], c: &mut [T]);

    /// Whether coefficients are read from memory rather than generated.
    fn is_stored(&self) -> bool {
        false
    }
}

/// Coefficients held in three meshes shaped like the solution mesh.
#[derive(Debug, Clone)]
pub struct StoredCoefficients<T> {
    pub a: Mesh<T>,
    pub b: Mesh<T>,
    pub c: Mesh<T>,
}

impl<T: Real> CoefficientSource<T> for StoredCoefficients<T> {
    fn fill(&self, line: &LineRef, a: &mut [T], b: &mut [T], c: &mut [T]) {
        for i in 0..line.len {
            let o = line.at(i);
            a[i] = self.a.data[o];
            b[i] = self.b.data[o];
            c[i] = self.c.data[o];
        }
        // corners lie outside the matrix of the line
        a[0] = T::ZERO;
        c[line.len - 1] = T::ZERO;
    }

    fn is_stored(&self) -> bool {
        true
    }
}

/// Coefficients computed per row by a closure `f(line, row) -> (a, b, c)`.
pub struct GeneratedCoefficients<F>(pub F);

impl<T: Real, F: Fn(&LineRef, usize) -> (T, T, T)> CoefficientSource<T> for GeneratedCoefficients<F> {
    fn fill(&self, line: &LineRef, a: &mut [T], b: &mut [T], c: &mut [T]) {
        for i in 0..line.len {
            let (ai, bi, ci) = (self.0)(line, i);
            a[i] = ai;
            b[i] = bi;
            c[i] = ci;
        }
        a[0] = T::ZERO;
        c[line.len - 1] = T::ZERO;
    }
}

/// Software blocking of a line solve.
///
/// `group` lines are interleaved in the inner loop of the kernel and `vector`
/// lines advance together per step; a block holds `group · vector` lines.
/// Neither affects the arithmetic performed on any line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecConfig {
    pub group: usize,
    pub vector: usize,
}

impl Default for ExecConfig {
    fn default() -> Self {
        Self {
            group: 32,
            vector: 8,
        }
    }
}

impl ExecConfig {
    pub const SERIAL: ExecConfig = ExecConfig {
        group: 1,
        vector: 1,
    };

    fn block(&self) -> usize {
        self.group.max(1) * self.vector.max(1)
    }
}

/// A line solve failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{axis}-line {line} of mesh {batch}: {source}")]
pub struct LineSolveError {
    pub batch: usize,
    /// Line number within the mesh.
    pub line: usize,
    pub axis: Axis,
    #[source]
    pub source: SolveError,
}

/// Solves every line of `mesh` along `axis`, replacing the right-hand side
/// stored in the mesh with the solution.
///
/// Lines are processed in blocks of `group · vector`. For Thomas the block is
/// gathered into an interleaved buffer (X lines through `vector × vector`
/// transposes) and swept by the lane kernel; other algorithms solve each line
/// of the block separately. All lines are attempted; the first failure in
/// line order is returned.
pub fn solve_lines<T: Real, C: CoefficientSource<T> + ?Sized>(
    mesh: &mut Mesh<T>,
    coeffs: &C,
    axis: Axis,
    algo: Algorithm,
    exec: ExecConfig,
) -> Result<(), LineSolveError> {
    let view = LineBatchView::new(mesh.dims, mesh.batch, axis);
    let n = view.system_len();
    let count = view.count();
    let block = exec.block().min(count);
    let vector = exec.vector.max(1);

    let mut a = vec![T::ZERO; n * block];
    let mut b = vec![T::ZERO; n * block];
    let mut c = vec![T::ZERO; n * block];
    let mut d = vec![T::ZERO; n * block];
    let mut scratch = vec![T::ZERO; n * block];
    let mut la = vec![T::ZERO; n];
    let mut lb = vec![T::ZERO; n];
    let mut lc = vec![T::ZERO; n];
    let mut failures = vec![None; block];
    let mut tile = vec![T::ZERO; vector * vector];
    let mut first_error: Option<LineSolveError> = None;

    let mut start = 0;
    while start < count {
        let lanes = block.min(count - start);
        for l in 0..lanes {
            let line = view.line(start + l);
            coeffs.fill(&line, &mut la, &mut lb, &mut lc);
            for i in 0..n {
                a[i * lanes + l] = la[i];
                b[i * lanes + l] = lb[i];
                c[i * lanes + l] = lc[i];
            }
        }
        gather_block(mesh, &view, start, lanes, vector, &mut d, &mut tile);

        match algo {
            Algorithm::Thomas => {
                thomas_interleaved(n, lanes, vector, &a, &b, &c, &mut d, &mut scratch, &mut failures);
                for (l, f) in failures.iter().take(lanes).enumerate() {
                    if let (Some(index), None) = (f, &first_error) {
                        let line = view.line(start + l);
                        first_error = Some(LineSolveError {
                            batch: line.batch,
                            line: line.local,
                            axis,
                            source: SolveError::ZeroPivot { index: *index },
                        });
                    }
                }
            }
            _ => {
                for l in 0..lanes {
                    let pick = |v: &[T]| (0..n).map(|i| v[i * lanes + l]).collect::<Vec<T>>();
                    let result = TridiagonalSystem::new(pick(&a), pick(&b), pick(&c), pick(&d))
                        .and_then(|sys| algo.solve(&sys));
                    match result {
                        Ok(u) => {
                            for (i, v) in u.into_iter().enumerate() {
                                d[i * lanes + l] = v;
                            }
                        }
                        Err(source) => {
                            if first_error.is_none() {
                                let line = view.line(start + l);
                                first_error = Some(LineSolveError {
                                    batch: line.batch,
                                    line: line.local,
                                    axis,
                                    source,
                                });
                            }
                        }
                    }
                }
            }
        }
        scatter_block(mesh, &view, start, lanes, vector, &d, &mut tile);
        start += lanes;
    }
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Loads lines `start..start+lanes` into `buf` with row `i` of lane `l` at
/// `i * lanes + l`.
fn gather_block<T: Real>(
    mesh: &Mesh<T>,
    view: &LineBatchView,
    start: usize,
    lanes: usize,
    vector: usize,
    buf: &mut [T],
    tile: &mut [T],
) {
    let n = view.system_len();
    if view.axis != Axis::X {
        // adjacent lanes are adjacent in memory within a plane
        for l in 0..lanes {
            let line = view.line(start + l);
            for i in 0..n {
                buf[i * lanes + l] = mesh.data[line.at(i)];
            }
        }
        return;
    }
    // X lines are contiguous runs: read v×v tiles row-wise (one line per row)
    // and transpose so each row of the tile holds one position of v lanes.
    let mut l0 = 0;
    while l0 < lanes {
        let w = vector.min(lanes - l0);
        let mut i0 = 0;
        while i0 < n {
            let h = vector.min(n - i0);
            tile.fill(T::ZERO);
            for r in 0..w {
                let base = view.line(start + l0 + r).base + i0;
                tile[r * vector..r * vector + h].copy_from_slice(&mesh.data[base..base + h]);
            }
            block_transpose(tile, vector);
            for col in 0..h {
                let row = (i0 + col) * lanes + l0;
                buf[row..row + w].copy_from_slice(&tile[col * vector..col * vector + w]);
            }
            i0 += vector;
        }
        l0 += vector;
    }
}

fn scatter_block<T: Real>(
    mesh: &mut Mesh<T>,
    view: &LineBatchView,
    start: usize,
    lanes: usize,
    vector: usize,
    buf: &[T],
    tile: &mut [T],
) {
    let n = view.system_len();
    if view.axis != Axis::X {
        for l in 0..lanes {
            let line = view.line(start + l);
            for i in 0..n {
                mesh.data[line.at(i)] = buf[i * lanes + l];
            }
        }
        return;
    }
    let mut l0 = 0;
    while l0 < lanes {
        let w = vector.min(lanes - l0);
        let mut i0 = 0;
        while i0 < n {
            let h = vector.min(n - i0);
            tile.fill(T::ZERO);
            for col in 0..h {
                let row = (i0 + col) * lanes + l0;
                tile[col * vector..col * vector + w].copy_from_slice(&buf[row..row + w]);
            }
            block_transpose(tile, vector);
            for r in 0..w {
                let base = view.line(start + l0 + r).base + i0;
                mesh.data[base..base + h].copy_from_slice(&tile[r * vector..r * vector + h]);
            }
            i0 += vector;
        }
        l0 += vector;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numbered(dims: Dims, batch: usize) -> Mesh<f64> {
        let mut v = 0.0;
        Mesh::from_fn(dims, batch, |_, _, _, _| {
            v += 1.0;
            v
        })
        .unwrap()
    }

    #[test]
    fn line_counts() {
        let dims = Dims::new(4, 3, 2);
        let x = LineBatchView::new(dims, 1, Axis::X);
        assert_eq!((x.count(), x.system_len()), (6, 4));
        let z = LineBatchView::new(dims, 1, Axis::Z);
        assert_eq!((z.count(), z.system_len()), (12, 2));
        let y = LineBatchView::new(dims, 3, Axis::Y);
        assert_eq!((y.count(), y.system_len()), (3 * 8, 3));
        let m = numbered(dims, 1);
        assert_eq!(gather_lines(&m, Axis::X).count(), 6);
        assert!(gather_lines(&m, Axis::Z).all(|l| l.len() == 2));
    }

    #[test]
    fn line_order_matches_storage() {
        let dims = Dims::new(4, 3, 2);
        let m = numbered(dims, 2);
        let view = LineBatchView::new(dims, 2, Axis::Y);
        let line = view.line(5); // b=0, k=1, i=1
        assert_eq!(line.base, m.offset(0, 1, 0, 1));
        let line = view.line(9); // b=1, k=0, i=1
        assert_eq!(line.base, m.offset(1, 1, 0, 0));
        let zl = LineBatchView::new(dims, 2, Axis::Z).line(13); // b=1, j=0, i=1
        assert_eq!(zl.base, m.offset(1, 1, 0, 0));
        let xl = LineBatchView::new(dims, 2, Axis::X).line(7); // b=1, k=0, j=1
        assert_eq!(xl.base, m.offset(1, 0, 1, 0));
    }

    #[test]
    fn gather_scatter_round_trip() {
        let dims = Dims::new(5, 3, 4);
        let m = numbered(dims, 2);
        for axis in Axis::ALL {
            let lines: Vec<Vec<f64>> = gather_lines(&m, axis).collect();
            let mut out = Mesh::zeros(dims, 2).unwrap();
            scatter_lines(&mut out, axis, &lines).unwrap();
            assert_eq!(out, m);
        }
    }

    #[test]
    fn scatter_rejects_short_input() {
        let mut m = numbered(Dims::new(3, 3, 1), 1);
        let lines = vec![vec![0.0; 3]; 2];
        assert!(scatter_lines(&mut m, Axis::X, &lines).is_err());
    }

    #[test]
    fn transpose_small() {
        let mut t = [7.0];
        block_transpose(&mut t, 1);
        assert_eq!(t, [7.0]);
        let mut t = [1, 2, 3, 4];
        block_transpose(&mut t, 2);
        assert_eq!(t, [1, 3, 2, 4]);
    }

    #[test]
    fn identity_lines_leave_mesh_unchanged() {
        let dims = Dims::new(6, 5, 4);
        let m = numbered(dims, 2);
        let ident = GeneratedCoefficients(|_: &LineRef, _| (0.0, 1.0, 0.0));
        for axis in Axis::ALL {
            for exec in [ExecConfig::SERIAL, ExecConfig { group: 3, vector: 4 }] {
                let mut out = m.clone();
                solve_lines(&mut out, &ident, axis, Algorithm::Thomas, exec).unwrap();
                assert_eq!(out, m);
            }
        }
    }

    #[test]
    fn failing_line_is_identified() {
        let dims = Dims::new(4, 3, 2);
        let mut m = numbered(dims, 2);
        // line 4 of mesh 1 along Z has a zero pivot in row 1
        let coeffs = GeneratedCoefficients(|line: &LineRef, i| {
            if line.batch == 1 && line.local == 4 && i == 1 {
                (0.0, 0.0, 0.0)
            } else {
                (0.0, 1.0, 0.0)
            }
        });
        for algo in [Algorithm::Thomas, Algorithm::Pcr] {
            let err = solve_lines(&mut m, &coeffs, Axis::Z, algo, ExecConfig::default()).unwrap_err();
            assert_eq!(
                err,
                LineSolveError {
                    batch: 1,
                    line: 4,
                    axis: Axis::Z,
                    source: SolveError::ZeroPivot { index: 1 }
                }
            );
        }
    }
}
