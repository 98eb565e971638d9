//! Polarization and symmetric-decreasing rearrangement of fields sampled at
//! the cell centers of a uniform grid on `[-L, L]^dim`.
//!
//! Cell `j` along an axis has center `(2j + 1 - n) h / 2` with `h = 2L / n`,
//! so the doubled integer coordinates `2j + 1 - n` are odd and no center
//! sits at the origin.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::report::fmt17;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetrizeError {
    #[error("reflection across the hyperplane with normal {0:?} does not preserve the cell-center lattice")]
    NonLatticeReflection(Vec<f64>),
    #[error("normal has length {0}, expected 1")]
    NotUnitNormal(f64),
    #[error("normal has {got} components, field has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rearrangement needs nonnegative values, found {0}")]
    NegativeValues(f64),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub dim: usize,
    pub n: usize,
    /// Half-width `L` of the box.
    pub extent: f64,
    /// Row-major (last axis fastest).
    pub values: Vec<f64>,
}

impl GridField {
    pub fn new(dim: usize, n: usize, extent: f64, values: Vec<f64>) -> Result<Self, SymmetrizeError> {
        if dim == 0 {
            return Err(SymmetrizeError::InvalidField("dimension must be positive".into()));
        }
        if n == 0 || !n.is_multiple_of(2) {
            return Err(SymmetrizeError::InvalidField(format!("n = {n} must be even and positive")));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(SymmetrizeError::InvalidField(format!("extent {extent} must be positive")));
        }
        let cells = n
            .checked_pow(dim as u32)
            .ok_or_else(|| SymmetrizeError::InvalidField("grid too large".into()))?;
        if values.len() != cells {
            return Err(SymmetrizeError::InvalidField(format!(
                "expected {cells} values, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(SymmetrizeError::InvalidField(format!("non-finite value {v}")));
        }
        Ok(Self { dim, n, extent, values })
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(dim: usize, n: usize, extent: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self, SymmetrizeError> {
        let h = 2.0 * extent / n as f64;
        let cells = n.pow(dim as u32);
        let mut x = vec![0.0; dim];
        let mut values = Vec::with_capacity(cells);
        let mut idx = vec![0usize; dim];
        for _ in 0..cells {
            for (xk, &j) in x.iter_mut().zip(&idx) {
                *xk = (2.0 * j as f64 + 1.0 - n as f64) * 0.5 * h;
            }
            values.push(f(&x));
            increment(&mut idx, n);
        }
        Self::new(dim, n, extent, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.n as f64
    }

    pub fn cell_measure(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for k in (0..self.dim).rev() {
            idx[k] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &j| acc * self.n + j)
    }

    /// Doubled integer coordinates `2j + 1 - n` of a cell center.
    fn doubled(&self, idx: &[usize]) -> Vec<i64> {
        idx.iter().map(|&j| 2 * j as i64 + 1 - self.n as i64).collect()
    }

    fn index_of_doubled(&self, c: &[i64]) -> Vec<usize> {
        c.iter().map(|&ck| ((ck + self.n as i64 - 1) / 2) as usize).collect()
    }

    /// `sum_k (2 j_k + 1 - n)^2`, i.e. `|x|^2 (2/h)^2` exactly.
    pub fn radius_key(&self, flat: usize) -> u64 {
        self.doubled(&self.multi_index(flat))
            .iter()
            .map(|c| (c * c) as u64)
            .sum()
    }

    /// Rotation by a quarter turn in the plane of axes `(i, j)`:
    /// `(x_i, x_j) -> (-x_j, x_i)`.
    pub fn rotate_quarter(&self, i: usize, j: usize) -> GridField {
        let mut values = vec![0.0; self.len()];
        for (flat, &v) in self.values.iter().enumerate() {
            let mut c = self.doubled(&self.multi_index(flat));
            let (ci, cj) = (c[i], c[j]);
            c[i] = -cj;
            c[j] = ci;
            values[self.flat_index(&self.index_of_doubled(&c))] = v;
        }
        GridField { values, ..self.clone() }
    }

    /// Plain-text export: `dim n L` on the first line, then one row of the
    /// last axis per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.dim, self.n, fmt17(self.extent));
        for row in self.values.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

impl FromStr for GridField {
    type Err = SymmetrizeError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| SymmetrizeError::Parse("empty input".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(SymmetrizeError::Parse(format!("header `{header}` is not `dim n L`")));
        }
        let dim = head[0]
            .parse()
            .map_err(|_| SymmetrizeError::Parse(format!("bad dimension `{}`", head[0])))?;
        let n = head[1]
            .parse()
            .map_err(|_| SymmetrizeError::Parse(format!("bad node count `{}`", head[1])))?;
        let extent = head[2]
            .parse()
            .map_err(|_| SymmetrizeError::Parse(format!("bad extent `{}`", head[2])))?;
        let values = lines
            .flat_map(str::split_whitespace)
            .map(|t| t.parse::<f64>().map_err(|_| SymmetrizeError::Parse(format!("bad value `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        GridField::new(dim, n, extent, values)
    }
}

fn increment(idx: &mut [usize], n: usize) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < n {
            return;
        }
        idx[k] = 0;
    }
}

/// Lattice action of a reflection through the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reflection {
    /// `c_i -> -c_i`.
    Axis(usize),
    /// `(c_i, c_j) -> (c_j, c_i)` when `same`, else `(-c_j, -c_i)`.
    Diagonal { i: usize, j: usize, same: bool },
}

impl Reflection {
    fn apply(&self, c: &mut [i64]) {
        match *self {
            Reflection::Axis(i) => c[i] = -c[i],
            Reflection::Diagonal { i, j, same } => {
                let (ci, cj) = (c[i], c[j]);
                if same {
                    c[i] = cj;
                    c[j] = ci;
                } else {
                    c[i] = -cj;
                    c[j] = -ci;
                }
            }
        }
    }
}

/// Half-space `{x : <normal, x> > 0}` bounded by a hyperplane through the
/// origin.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    normal: Vec<f64>,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>) -> Result<Self, SymmetrizeError> {
        let len = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !((len - 1.0).abs() <= 1e-12) {
            return Err(SymmetrizeError::NotUnitNormal(len));
        }
        Ok(Self { normal })
    }

    /// `sign * e_i` in `dim` dimensions.
    pub fn axis(dim: usize, i: usize, sign: f64) -> Self {
        let mut normal = vec![0.0; dim];
        normal[i] = sign.signum();
        Self { normal }
    }

    /// `(s_i e_i + s_j e_j) / sqrt(2)`.
    pub fn diagonal(dim: usize, i: usize, si: f64, j: usize, sj: f64) -> Self {
        let mut normal = vec![0.0; dim];
        normal[i] = si.signum() * std::f64::consts::FRAC_1_SQRT_2;
        normal[j] = sj.signum() * std::f64::consts::FRAC_1_SQRT_2;
        Self { normal }
    }

    /// The lattice-preserving half-spaces in `dim` dimensions: both
    /// orientations of every axis and every diagonal hyperplane.
    pub fn lattice_family(dim: usize) -> Vec<HalfSpace> {
        let mut out = Vec::new();
        for i in 0..dim {
            for s in [1.0, -1.0] {
                out.push(Self::axis(dim, i, s));
            }
        }
        for i in 0..dim {
            for j in i + 1..dim {
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    out.push(Self::diagonal(dim, i, si, j, sj));
                }
            }
        }
        out
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    fn reflection(&self) -> Result<Reflection, SymmetrizeError> {
        let tol = 1e-12;
        let nonzero: Vec<usize> = (0..self.normal.len()).filter(|&k| self.normal[k].abs() > tol).collect();
        let non_lattice = || SymmetrizeError::NonLatticeReflection(self.normal.clone());
        match nonzero.as_slice() {
            [i] => Ok(Reflection::Axis(*i)),
            [i, j] => {
                let (ni, nj) = (self.normal[*i], self.normal[*j]);
                if (ni.abs() - nj.abs()).abs() > tol {
                    return Err(non_lattice());
                }
                Ok(Reflection::Diagonal {
                    i: *i,
                    j: *j,
                    same: ni * nj < 0.0,
                })
            }
            _ => Err(non_lattice()),
        }
    }

    /// `<normal, c>` on doubled coordinates; the sign decides membership.
    fn side(&self, c: &[i64]) -> f64 {
        self.normal.iter().zip(c).map(|(n, &ck)| n * ck as f64).sum()
    }
}

/// Two-point rearrangement: `max(u(x), u(sigma x))` on `H`, `min` on the
/// complement. Cells on the hyperplane are fixed by the reflection and
/// keep their value.
pub fn polarize(field: &GridField, h: &HalfSpace) -> Result<GridField, SymmetrizeError> {
    if h.normal.len() != field.dim {
        return Err(SymmetrizeError::DimensionMismatch {
            expected: field.dim,
            got: h.normal.len(),
        });
    }
    let reflection = h.reflection()?;
    let mut values = field.values.clone();
    for (flat, out) in values.iter_mut().enumerate() {
        let mut c = field.doubled(&field.multi_index(flat));
        let side = h.side(&c);
        reflection.apply(&mut c);
        let mirror = field.values[field.flat_index(&field.index_of_doubled(&c))];
        let own = field.values[flat];
        if side > 1e-9 {
            *out = own.max(mirror);
        } else if side < -1e-9 {
            *out = own.min(mirror);
        }
    }
    Ok(GridField { values, ..field.clone() })
}

/// Symmetric-decreasing rearrangement: the values sorted descending are
/// dealt to the cells in order of increasing center radius, ties broken by
/// row-major cell index.
pub fn rearrange(field: &GridField) -> Result<GridField, SymmetrizeError> {
    if let Some(v) = field.values.iter().copied().find(|v| *v < 0.0) {
        return Err(SymmetrizeError::NegativeValues(v));
    }
    let mut sorted = field.values.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cells: Vec<(u64, usize)> = (0..field.len()).map(|i| (field.radius_key(i), i)).collect();
    cells.sort_unstable();
    let mut values = vec![0.0; field.len()];
    for (&(_, cell), v) in cells.iter().zip(sorted) {
        values[cell] = v;
    }
    Ok(GridField { values, ..field.clone() })
}

/// `sum over interior faces of |x_face|^{2a} (forward difference / h)^2 h^dim`
/// with `x_face` the face midpoint.
pub fn weighted_dirichlet(field: &GridField, a: f64) -> f64 {
    let h = field.spacing();
    let measure = field.cell_measure();
    let mut stride = 1;
    let mut strides = vec![0; field.dim];
    for k in (0..field.dim).rev() {
        strides[k] = stride;
        stride *= field.n;
    }
    let mut total = 0.0;
    for flat in 0..field.len() {
        let idx = field.multi_index(flat);
        let c = field.doubled(&idx);
        for axis in 0..field.dim {
            if idx[axis] + 1 == field.n {
                continue;
            }
            let diff = (field.values[flat + strides[axis]] - field.values[flat]) / h;
            // face midpoint: doubled coordinate c + 1 along the axis
            let r2: f64 = c
                .iter()
                .enumerate()
                .map(|(k, &ck)| {
                    let x = if k == axis { (ck + 1) as f64 } else { ck as f64 } * 0.5 * h;
                    x * x
                })
                .sum();
            let weight = if a == 0.0 { 1.0 } else { r2.powf(a) };
            total += weight * diff * diff * measure;
        }
    }
    total
}

/// `(sum |v|^q h^dim)^{1/q}`, summed in ascending order of `|v|^q` so the
/// result depends only on the multiset of values.
pub fn lp_cellsum(field: &GridField, q: f64) -> f64 {
    let mut terms: Vec<f64> = field.values.iter().map(|v| v.abs().powf(q)).collect();
    terms.sort_by(f64::total_cmp);
    (terms.iter().sum::<f64>() * field.cell_measure()).powf(1.0 / q)
}

/// `l^2` cell-metric distance between two fields on the same grid.
pub fn l2_distance(u: &GridField, v: &GridField) -> f64 {
    let s: f64 = u.values.iter().zip(&v.values).map(|(a, b)| (a - b) * (a - b)).sum();
    (s * u.cell_measure()).sqrt()
}

/// Nonnegative smooth field: a sum of 1 to 4 Gaussian bumps with random
/// centers inside `[-L/2, L/2]^dim`, widths in `[L/10, L/4]` and amplitudes
/// in `[0.5, 2]`, fully determined by `seed`.
pub fn random_smooth_field(dim: usize, n: usize, extent: f64, seed: u64) -> Result<GridField, SymmetrizeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(Vec<f64>, f64, f64)> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..0.5) * extent).collect();
            let width = rng.gen_range(0.1..0.25) * extent;
            let amplitude = rng.gen_range(0.5..2.0);
            (center, width, amplitude)
        })
        .collect();
    GridField::from_fn(dim, n, extent, |x| {
        bumps
            .iter()
            .map(|(c, w, amp)| {
                let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                amp * (-r2 / (w * w)).exp()
            })
            .sum()
    })
}

/// Property measurements for one field.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRow {
    pub seed: u64,
    /// Largest relative change of `lp_cellsum` (q = 2 and q = p) under any
    /// lattice polarization.
    pub polarization_lp_change: f64,
    /// Largest `|D(u_H) - D(u)| / D(u)` over the lattice polarizations.
    pub polarization_dirichlet_defect: f64,
    /// Largest relative change of `lp_cellsum` under rearrangement.
    pub rearrangement_lp_change: f64,
    /// `(D(u*) - D(u)) / D(u)`.
    pub rearrangement_excess: f64,
}

/// Allowed relative excess `D(u*) / D(u) - 1` of the lattice rearrangement:
/// `h / L = 2 / n`.
pub fn rearrangement_tolerance(n: usize) -> f64 {
    2.0 / n as f64
}

/// Measures the polarization and rearrangement properties on the field
/// generated from `seed`.
pub fn corpus_row(seed: u64, dim: usize, n: usize, extent: f64, a: f64, p: f64) -> Result<CorpusRow, SymmetrizeError> {
    let u = random_smooth_field(dim, n, extent, seed)?;
    let d0 = weighted_dirichlet(&u, a);
    let norms = |f: &GridField| [lp_cellsum(f, 2.0), lp_cellsum(f, p)];
    let base = norms(&u);
    let rel = |x: [f64; 2]| {
        x.iter()
            .zip(&base)
            .map(|(a, b)| (a - b).abs() / b)
            .fold(0.0, f64::max)
    };
    let mut lp_change: f64 = 0.0;
    let mut defect: f64 = 0.0;
    for h in HalfSpace::lattice_family(dim) {
        let uh = polarize(&u, &h)?;
        lp_change = lp_change.max(rel(norms(&uh)));
        defect = defect.max((weighted_dirichlet(&uh, a) - d0).abs() / d0);
    }
    let star = rearrange(&u)?;
    Ok(CorpusRow {
        seed,
        polarization_lp_change: lp_change,
        polarization_dirichlet_defect: defect,
        rearrangement_lp_change: rel(norms(&star)),
        rearrangement_excess: (weighted_dirichlet(&star, a) - d0) / d0,
    })
}

/// Iterates the lattice polarizations cyclically for `sweeps` passes and
/// returns the `l^2` distance to the rearrangement before the first pass and
/// after each pass.
pub fn polarization_sweeps(field: &GridField, sweeps: usize) -> Result<Vec<f64>, SymmetrizeError> {
    let star = rearrange(field)?;
    let family = HalfSpace::lattice_family(field.dim);
    let mut u = field.clone();
    let mut out = vec![l2_distance(&u, &star)];
    for _ in 0..sweeps {
        for h in &family {
            u = polarize(&u, h)?;
        }
        out.push(l2_distance(&u, &star));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radial(n: usize) -> GridField {
        GridField::from_fn(2, n, 1.0, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap()
    }

    #[test]
    fn field_validation() {
        assert!(GridField::new(2, 3, 1.0, vec![0.0; 9]).is_err());
        assert!(GridField::new(2, 4, 1.0, vec![0.0; 15]).is_err());
        assert!(GridField::new(2, 4, 0.0, vec![0.0; 16]).is_err());
        assert!(GridField::new(2, 4, 1.0, vec![f64::NAN; 16]).is_err());
        assert!(GridField::new(2, 4, 1.0, vec![0.0; 16]).is_ok());
    }

    #[test]
    fn text_roundtrip() {
        let f = random_smooth_field(2, 8, 1.5, 3).unwrap();
        let back: GridField = f.to_text().parse().unwrap();
        assert_eq!(back, f);
        assert!("2 4".parse::<GridField>().is_err());
        assert!("2 4 1\n1 2 x".parse::<GridField>().is_err());
    }

    #[test]
    fn radius_keys_are_odd_sums() {
        let f = radial(4);
        // corner cell (0, 0) has doubled coordinates (-3, -3)
        assert_eq!(f.radius_key(0), 18);
        // cell (1, 2) has (-1, 1)
        assert_eq!(f.radius_key(6), 2);
    }

    #[test]
    fn radial_field_is_fixed_by_polarization() {
        let f = radial(16);
        for h in HalfSpace::lattice_family(2) {
            assert_eq!(polarize(&f, &h).unwrap(), f);
        }
    }

    #[test]
    fn single_cell_indicator() {
        let mut values = vec![0.0; 16];
        // cell (0, 3): x_0 < 0, x_1 > 0
        values[3] = 1.0;
        let f = GridField::new(2, 4, 1.0, values).unwrap();
        let inside = HalfSpace::axis(2, 0, -1.0);
        assert_eq!(polarize(&f, &inside).unwrap(), f);
        let outside = HalfSpace::axis(2, 0, 1.0);
        let g = polarize(&f, &outside).unwrap();
        // reflected to cell (3, 3)
        assert_eq!(g.values[15], 1.0);
        assert_eq!(g.values.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn non_lattice_normal_rejected() {
        let f = radial(4);
        let h = HalfSpace::new(vec![0.6, 0.8]).unwrap();
        assert!(matches!(polarize(&f, &h), Err(SymmetrizeError::NonLatticeReflection(_))));
        assert!(matches!(HalfSpace::new(vec![1.0, 1.0]), Err(SymmetrizeError::NotUnitNormal(_))));
        let h3 = HalfSpace::axis(3, 0, 1.0);
        assert!(matches!(polarize(&f, &h3), Err(SymmetrizeError::DimensionMismatch { .. })));
    }

    #[test]
    fn rearranged_indicator_occupies_closest_cells() {
        let mut values = vec![0.0; 36];
        for i in [0, 5, 17, 30] {
            values[i] = 1.0;
        }
        let f = GridField::new(2, 6, 1.0, values).unwrap();
        let g = rearrange(&f).unwrap();
        // the four cells around the origin: (2,2), (2,3), (3,2), (3,3)
        let expected: Vec<usize> = vec![14, 15, 20, 21];
        let got: Vec<usize> = (0..36).filter(|&i| g.values[i] == 1.0).collect();
        assert_eq!(got, expected);
        assert_eq!(rearrange(&g).unwrap(), g);
    }

    #[test]
    fn rearrangement_rejects_negative() {
        let f = GridField::new(1, 2, 1.0, vec![1.0, -0.5]).unwrap();
        assert_eq!(rearrange(&f), Err(SymmetrizeError::NegativeValues(-0.5)));
    }

    #[test]
    fn dirichlet_examples() {
        let c = GridField::from_fn(2, 8, 1.0, |_| 3.0).unwrap();
        assert_eq!(weighted_dirichlet(&c, 0.4), 0.0);
        // u = x_1 with a = 0: unit gradient over (n - 1) n faces of area h^2
        let n = 64;
        let lin = GridField::from_fn(2, n, 1.0, |x| x[0]).unwrap();
        let h = lin.spacing();
        let expected = ((n - 1) * n) as f64 * h * h;
        assert!((weighted_dirichlet(&lin, 0.0) - expected).abs() < 1e-12);
        assert!((expected - 4.0).abs() < 4.0 * 2.0 / n as f64);
    }

    #[test]
    fn lp_examples() {
        let mut values = vec![0.0; 16];
        values[5] = 1.0;
        let f = GridField::new(2, 4, 1.0, values).unwrap();
        assert!((lp_cellsum(&f, 2.0) - f.cell_measure().sqrt()).abs() < 1e-15);
        let g = random_smooth_field(2, 16, 1.0, 9).unwrap();
        let g2 = GridField {
            values: g.values.iter().map(|v| 2.0 * v).collect(),
            ..g.clone()
        };
        for q in [1.0, 2.0, 3.5] {
            assert!((lp_cellsum(&g2, q) - 2.0 * lp_cellsum(&g, q)).abs() < 1e-13 * lp_cellsum(&g2, q));
        }
    }

    #[test]
    fn quarter_rotation_preserves_dirichlet() {
        let f = random_smooth_field(2, 32, 2.0, 11).unwrap();
        let g = f.rotate_quarter(0, 1);
        assert_ne!(f, g);
        let (df, dg) = (weighted_dirichlet(&f, 0.3), weighted_dirichlet(&g, 0.3));
        assert!((df - dg).abs() < 1e-12 * df);
        assert_eq!(f.rotate_quarter(0, 1).rotate_quarter(0, 1).rotate_quarter(0, 1).rotate_quarter(0, 1), f);
    }
}
