use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{RegisterLayout, SubsystemKind};
use crate::error::{Error, Result};
use crate::rwa::{LadderMonomial, OpKind};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_term(term: &LadderMonomial, layout: &RegisterLayout) -> Result<()> {
    term.validate()?;
    for &(i, k) in &term.factors {
        let sub = layout.kind(i)?;
        let ok = match sub {
            SubsystemKind::Boson => k.is_bosonic(),
            SubsystemKind::Qubit => !k.is_bosonic(),
        };
        if !ok {
            return Err(Error::KindMismatch {
                kind: k.name(),
                subsystem: sub.name(),
                index: i,
            });
        }
    }
    Ok(())
}

/// Image of basis vector `col` under `term`: a monomial maps each basis
/// vector onto at most one basis vector.
///
/// The term must already be valid for the layout.
pub fn apply_to_basis(
    term: &LadderMonomial,
    layout: &RegisterLayout,
    strides: &[usize],
    col: usize,
) -> Option<(usize, Complex64)> {
    let mut index = col;
    let mut amp = 1.0f64;
    for &(i, k) in term.factors.iter().rev() {
        let dim = layout.subsystems[i].dim;
        let stride = strides[i];
        let d = (index / stride) % dim;
        match k {
            OpKind::Create => {
                if d + 1 >= dim {
                    return None;
                }
                amp *= ((d + 1) as f64).sqrt();
                index += stride;
            }
            OpKind::Annihilate => {
                if d == 0 {
                    return None;
                }
                amp *= (d as f64).sqrt();
                index -= stride;
            }
            OpKind::Number => {
                if d == 0 {
                    return None;
                }
                amp *= d as f64;
            }
            OpKind::PauliPlus => {
                if d == 1 {
                    return None;
                }
                index += stride;
            }
            OpKind::PauliMinus => {
                if d == 0 {
                    return None;
                }
                index -= stride;
            }
            OpKind::PauliZ => {
                if d == 0 {
                    amp = -amp;
                }
            }
        }
    }
    Some((index, term.coeff * amp))
}

/// Sparse operator in compressed-row form over a register.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    layout: RegisterLayout,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(layout: &RegisterLayout) -> Self {
        Self {
            layout: layout.clone(),
            row_ptr: vec![0; layout.dim() + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Sums duplicate `(row, col)` entries and drops exact zeros.
    pub fn from_triplets(
        layout: &RegisterLayout,
        mut triplets: Vec<(usize, usize, Complex64)>,
    ) -> Result<Self> {
        let dim = layout.dim();
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::IndexOutOfRange {
                index: r.max(c),
                len: dim,
            });
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut keep_cols = Vec::with_capacity(rows.len());
        let mut keep_vals = Vec::with_capacity(rows.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != ZERO {
                keep_rows.push(r);
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for &r in &keep_rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            layout: layout.clone(),
            row_ptr,
            cols: keep_cols,
            vals: keep_vals,
        })
    }

    pub fn from_dense(layout: &RegisterLayout, m: &DMatrix<Complex64>) -> Result<Self> {
        let dim = layout.dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::LayoutMismatch(format!(
                "{}x{} matrix for a register of dimension {dim}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut trip = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                if m[(r, c)] != ZERO {
                    trip.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(layout, trip)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Iterates over stored `(row, col, value)` entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (r, self.cols[p], self.vals[p]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[span.clone()].binary_search(&col) {
            Ok(p) => self.vals[span.start + p],
            Err(_) => ZERO,
        }
    }

    /// `y += alpha · A x`.
    pub fn mul_add(&self, alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[p] * x[self.cols[p]];
            }
            *out += alpha * acc;
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.dim()];
        self.mul_add(Complex64::new(1.0, 0.0), x, &mut y);
        y
    }

    pub fn adjoint(&self) -> Self {
        let trip = self.entries().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(&self.layout, trip).expect("adjoint keeps indices in range")
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let trip = self.entries().map(|(r, c, v)| (r, c, v * s)).collect();
        Self::from_triplets(&self.layout, trip).expect("scaling keeps indices in range")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch("operator layouts differ".into()));
        }
        let trip = self.entries().chain(other.entries()).collect();
        Self::from_triplets(&self.layout, trip)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch("operator layouts differ".into()));
        }
        let mut trip = Vec::new();
        for (r, k, a) in self.entries() {
            for p in other.row_ptr[k]..other.row_ptr[k + 1] {
                trip.push((r, other.cols[p], a * other.vals[p]));
            }
        }
        Self::from_triplets(&self.layout, trip)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.adjoint();
        let diff = self
            .add(&adj.scaled(Complex64::new(-1.0, 0.0)))
            .expect("same layout");
        diff.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::from_element(n, n, ZERO);
        for (r, c, v) in self.entries() {
            m[(r, c)] += v;
        }
        m
    }
}

pub fn build_operator(term: &LadderMonomial, layout: &RegisterLayout) -> Result<OperatorMatrix> {
    build_sum(std::slice::from_ref(term), layout)
}

/// Sum of the matrices of every term.
pub fn build_sum(terms: &[LadderMonomial], layout: &RegisterLayout) -> Result<OperatorMatrix> {
    for t in terms {
        check_term(t, layout)?;
    }
    let strides = layout.strides();
    let dim = layout.dim();
    let mut trip = Vec::new();
    for t in terms {
        if t.coeff == ZERO {
            continue;
        }
        for col in 0..dim {
            if let Some((row, v)) = apply_to_basis(t, layout, &strides, col) {
                trip.push((row, col, v));
            }
        }
    }
    OperatorMatrix::from_triplets(layout, trip)
}

pub(crate) fn validate_term(term: &LadderMonomial, layout: &RegisterLayout) -> Result<()> {
    check_term(term, layout)
}
