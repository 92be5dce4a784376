//! Basis bookkeeping and sparse operators on `V^{⊗n}`, `V = C^N`.
//!
//! Sites and colors are 1-based in the public API. The full-space basis is
//! linearized big-endian: `index(J) = Σ_k (j_k - 1) N^(n-k)`, so site 1 is the
//! leftmost tensor factor.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::report::Comparison;
use crate::scalars::{relative_deviation, Scalar};

/// Largest full-space dimension the workbench will materialize.
pub const MAX_DIM: usize = 1 << 22;

/// Multi-index `J = (j_1, …, j_n)` with letters in `1..=N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState(Vec<usize>);

impl BasisState {
    pub fn new(letters: Vec<usize>, n_colors: usize) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::BadState("empty multi-index".into()));
        }
        if let Some(&bad) = letters.iter().find(|&&j| j == 0 || j > n_colors) {
            return Err(Error::BadState(format!("letter {bad} outside 1..={n_colors}")));
        }
        Ok(Self(letters))
    }

    pub fn from_index(mut index: usize, n_colors: usize, n_sites: usize) -> Self {
        let mut letters = vec![0; n_sites];
        for slot in letters.iter_mut().rev() {
            *slot = index % n_colors + 1;
            index /= n_colors;
        }
        Self(letters)
    }

    pub fn index(&self, n_colors: usize) -> usize {
        self.0.iter().fold(0, |acc, &j| acc * n_colors + (j - 1))
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn n_sites(&self) -> usize {
        self.0.len()
    }

    /// Letter at 1-based `site`.
    pub fn letter(&self, site: usize) -> usize {
        self.0[site - 1]
    }

    pub fn count(&self, color: usize) -> usize {
        self.0.iter().filter(|&&j| j == color).count()
    }

    pub fn weight(&self, n_colors: usize) -> WeightSector {
        WeightSector((1..=n_colors).map(|a| self.count(a)).collect())
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, j) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, ")")
    }
}

/// Occupation numbers `(M_1, …, M_N)` labelling a joint eigenspace of the
/// weight operators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightSector(Vec<usize>);

impl WeightSector {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::BadWeight("empty weight".into()));
        }
        Ok(Self(counts))
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn n_colors(&self) -> usize {
        self.0.len()
    }

    pub fn n_sites(&self) -> usize {
        self.0.iter().sum()
    }

    /// `M_a` for 1-based color `a`.
    pub fn count(&self, color: usize) -> usize {
        self.0[color - 1]
    }

    /// `n! / (M_1! … M_N!)`.
    pub fn dimension(&self) -> usize {
        let mut total = 0u128;
        let mut dim = 1u128;
        for &m in &self.0 {
            for k in 1..=m as u128 {
                total += 1;
                dim = dim * total / k;
            }
        }
        dim as usize
    }

    pub fn check(&self, n_colors: usize, n_sites: usize) -> Result<()> {
        if self.n_colors() != n_colors {
            return Err(Error::BadWeight(format!(
                "{self} has {} entries, expected N = {n_colors}",
                self.n_colors()
            )));
        }
        if self.n_sites() != n_sites {
            return Err(Error::BadWeight(format!("{self} sums to {}, expected n = {n_sites}", self.n_sites())));
        }
        Ok(())
    }

    /// The sorted multi-index `J_min = 1^{M_1} 2^{M_2} …`.
    pub fn minimal_state(&self) -> BasisState {
        BasisState(
            self.0
                .iter()
                .enumerate()
                .flat_map(|(a, &m)| std::iter::repeat_n(a + 1, m))
                .collect(),
        )
    }
}

impl fmt::Display for WeightSector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, m) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for WeightSector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let counts = inner
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::BadWeight(format!("cannot parse {s:?}")))?;
        Self::new(counts)
    }
}

/// All weights with `Σ M_a = n`, starting from `(n, 0, …, 0)` in descending
/// lexicographic order.
pub fn all_sectors(n_colors: usize, n_sites: usize) -> Vec<WeightSector> {
    fn rec(remaining: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<WeightSector>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(WeightSector(prefix.clone()));
            prefix.pop();
            return;
        }
        for m in (0..=remaining).rev() {
            prefix.push(m);
            rec(remaining - m, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n_colors > 0 {
        rec(n_sites, n_colors, &mut Vec::new(), &mut out);
    }
    out
}

/// States of the sector in lexicographic order.
pub fn enumerate_sector(n_colors: usize, n_sites: usize, weight: &WeightSector) -> Result<Vec<BasisState>> {
    if n_colors == 0 || n_sites == 0 {
        return Err(Error::BadWeight("N and n must be positive".into()));
    }
    weight.check(n_colors, n_sites)?;
    fn rec(remaining: &mut [usize], prefix: &mut Vec<usize>, n_sites: usize, out: &mut Vec<BasisState>) {
        if prefix.len() == n_sites {
            out.push(BasisState(prefix.clone()));
            return;
        }
        for a in 0..remaining.len() {
            if remaining[a] > 0 {
                remaining[a] -= 1;
                prefix.push(a + 1);
                rec(remaining, prefix, n_sites, out);
                prefix.pop();
                remaining[a] += 1;
            }
        }
    }
    let mut out = Vec::with_capacity(weight.dimension());
    rec(&mut weight.0.clone(), &mut Vec::with_capacity(n_sites), n_sites, &mut out);
    Ok(out)
}

/// Number of pairs `k < l` with `j_k > j_l`; equals the minimal number of
/// adjacent transpositions taking the sorted word to `J`.
pub fn inversion_length(state: &BasisState) -> usize {
    let j = state.letters();
    (0..j.len())
        .map(|k| j[k + 1..].iter().filter(|&&b| b < j[k]).count())
        .sum()
}

#[derive(Debug)]
pub struct SectorBasis {
    n_colors: usize,
    n_sites: usize,
    weight: WeightSector,
    states: Vec<BasisState>,
    lookup: HashMap<usize, usize>,
}

/// The vector space an operator acts on: all of `V^{⊗n}` or one weight sector.
#[derive(Clone, Debug)]
pub enum Space {
    Full { n_colors: usize, n_sites: usize },
    Sector(Arc<SectorBasis>),
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        self.n_colors() == other.n_colors()
            && self.n_sites() == other.n_sites()
            && self.weight() == other.weight()
    }
}

impl Space {
    pub fn full(n_colors: usize, n_sites: usize) -> Result<Self> {
        if n_colors == 0 || n_sites == 0 {
            return Err(Error::Config("N and n must be positive".into()));
        }
        let dim = (n_colors as u128).checked_pow(n_sites as u32);
        if dim.is_none_or(|d| d > MAX_DIM as u128) {
            return Err(Error::Config(format!("N^n too large for N = {n_colors}, n = {n_sites}")));
        }
        Ok(Space::Full { n_colors, n_sites })
    }

    pub fn sector(n_colors: usize, n_sites: usize, weight: &WeightSector) -> Result<Self> {
        Space::full(n_colors, n_sites)?;
        let states = enumerate_sector(n_colors, n_sites, weight)?;
        let lookup = states.iter().enumerate().map(|(k, s)| (s.index(n_colors), k)).collect();
        Ok(Space::Sector(Arc::new(SectorBasis {
            n_colors,
            n_sites,
            weight: weight.clone(),
            states,
            lookup,
        })))
    }

    pub fn n_colors(&self) -> usize {
        match self {
            Space::Full { n_colors, .. } => *n_colors,
            Space::Sector(b) => b.n_colors,
        }
    }

    pub fn n_sites(&self) -> usize {
        match self {
            Space::Full { n_sites, .. } => *n_sites,
            Space::Sector(b) => b.n_sites,
        }
    }

    pub fn weight(&self) -> Option<&WeightSector> {
        match self {
            Space::Full { .. } => None,
            Space::Sector(b) => Some(&b.weight),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Space::Full { n_colors, n_sites } => n_colors.pow(*n_sites as u32),
            Space::Sector(b) => b.states.len(),
        }
    }

    pub fn state(&self, k: usize) -> BasisState {
        match self {
            Space::Full { n_colors, n_sites } => BasisState::from_index(k, *n_colors, *n_sites),
            Space::Sector(b) => b.states[k].clone(),
        }
    }

    pub fn position(&self, state: &BasisState) -> Option<usize> {
        if state.n_sites() != self.n_sites() || state.letters().iter().any(|&j| j == 0 || j > self.n_colors()) {
            return None;
        }
        let full = state.index(self.n_colors());
        match self {
            Space::Full { .. } => Some(full),
            Space::Sector(b) => b.lookup.get(&full).copied(),
        }
    }

    fn describe(&self) -> String {
        match self.weight() {
            None => format!("V^(x{}) with N = {}", self.n_sites(), self.n_colors()),
            Some(w) => format!("sector ({w}) of V^(x{}), N = {}", self.n_sites(), self.n_colors()),
        }
    }

    fn check_same(&self, other: &Space) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.describe(), other.describe())));
        }
        Ok(())
    }
}

type Row<S> = Vec<(usize, S)>;

/// Sorts by column, merges duplicates and drops zeros.
fn canonical_row<S: Scalar>(mut row: Row<S>) -> Row<S> {
    row.sort_by_key(|(c, _)| *c);
    let mut out: Row<S> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv = lv.clone() + v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

/// Sparse linear operator, stored row-major with sorted columns and no
/// explicit zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainOperator<S> {
    space: Space,
    rows: Vec<Row<S>>,
}

impl<S: Scalar> ChainOperator<S> {
    pub fn from_rows(space: Space, rows: Vec<Row<S>>) -> Result<Self> {
        let dim = space.dim();
        if rows.len() != dim {
            return Err(Error::DimensionMismatch(format!("{} rows for dimension {dim}", rows.len())));
        }
        if rows.iter().flatten().any(|(c, _)| *c >= dim) {
            return Err(Error::DimensionMismatch(format!("column index out of range for dimension {dim}")));
        }
        let rows = rows.into_iter().map(canonical_row).collect();
        Ok(Self { space, rows })
    }

    pub fn from_triplets(space: Space, triplets: impl IntoIterator<Item = (usize, usize, S)>) -> Result<Self> {
        let dim = space.dim();
        let mut rows: Vec<Row<S>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            if r >= dim {
                return Err(Error::DimensionMismatch(format!("row {r} out of range for dimension {dim}")));
            }
            rows[r].push((c, v));
        }
        Self::from_rows(space, rows)
    }

    pub fn zero(space: Space) -> Self {
        let dim = space.dim();
        Self { space, rows: vec![Vec::new(); dim] }
    }

    pub fn identity(space: Space) -> Self {
        Self::diagonal(space, |_| S::one())
    }

    pub fn diagonal(space: Space, f: impl Fn(&BasisState) -> S) -> Self {
        let rows = (0..space.dim())
            .map(|k| {
                let v = f(&space.state(k));
                if v.is_zero() { Vec::new() } else { vec![(k, v)] }
            })
            .collect();
        Self { space, rows }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn rows(&self) -> &[Row<S>] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> S {
        self.rows[row]
            .binary_search_by_key(&col, |(c, _)| *c)
            .map(|k| self.rows[row][k].1.clone())
            .unwrap_or_else(|_| S::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// `self ∘ rhs`: apply `rhs` first, then `self`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        self.compose_with(rhs, Execution::default())
    }

    pub fn compose_with(&self, rhs: &Self, exec: Execution) -> Result<Self> {
        self.space.check_same(&rhs.space)?;
        let rows = exec.map_indexed(self.dim(), |r| {
            let mut acc: Vec<(usize, S)> = Vec::new();
            for (k, a) in &self.rows[r] {
                for (c, b) in &rhs.rows[*k] {
                    acc.push((*c, a.clone() * b.clone()));
                }
            }
            canonical_row(acc)
        });
        Ok(Self { space: self.space.clone(), rows })
    }

    /// Left-to-right product `ops[0] ∘ ops[1] ∘ …`.
    pub fn product<'a>(space: &Space, ops: impl IntoIterator<Item = &'a Self>) -> Result<Self> {
        let mut acc: Option<Self> = None;
        for op in ops {
            acc = Some(match acc {
                None => op.clone(),
                Some(a) => a.compose(op)?,
            });
        }
        Ok(acc.unwrap_or_else(|| Self::identity(space.clone())))
    }

    fn zip_rows(&self, rhs: &Self, f: impl Fn(Option<&S>, Option<&S>) -> S) -> Result<Self> {
        self.space.check_same(&rhs.space)?;
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(ra, rb)| {
                let (mut i, mut j) = (0, 0);
                let mut out = Vec::with_capacity(ra.len().max(rb.len()));
                while i < ra.len() || j < rb.len() {
                    let ca = ra.get(i).map(|e| e.0).unwrap_or(usize::MAX);
                    let cb = rb.get(j).map(|e| e.0).unwrap_or(usize::MAX);
                    if ca == cb {
                        out.push((ca, f(Some(&ra[i].1), Some(&rb[j].1))));
                        i += 1;
                        j += 1;
                    } else if ca < cb {
                        out.push((ca, f(Some(&ra[i].1), None)));
                        i += 1;
                    } else {
                        out.push((cb, f(None, Some(&rb[j].1))));
                        j += 1;
                    }
                }
                out.retain(|(_, v)| !v.is_zero());
                out
            })
            .collect();
        Ok(Self { space: self.space.clone(), rows })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_rows(rhs, |a, b| match (a, b) {
            (Some(a), Some(b)) => a.clone() + b.clone(),
            (Some(a), None) => a.clone(),
            (None, Some(b)) => b.clone(),
            (None, None) => S::zero(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_rows(rhs, |a, b| match (a, b) {
            (Some(a), Some(b)) => a.clone() - b.clone(),
            (Some(a), None) => a.clone(),
            (None, Some(b)) => -b.clone(),
            (None, None) => S::zero(),
        })
    }

    pub fn scale(&self, s: &S) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(c, v)| (*c, v.clone() * s.clone()))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        Self { space: self.space.clone(), rows }
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.compose(rhs)?.sub(&rhs.compose(self)?)
    }

    pub fn apply(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("vector of length {} for dimension {}", v.len(), self.dim())));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                let mut acc = S::zero();
                for (c, a) in row {
                    acc.mul_add_assign(a, &v[*c]);
                }
                acc
            })
            .collect())
    }

    /// The block of a full-space operator on one weight sector. Fails if any
    /// entry couples the sector to its complement.
    pub fn restrict(&self, weight: &WeightSector) -> Result<Self> {
        let (n_colors, n_sites) = match &self.space {
            Space::Full { n_colors, n_sites } => (*n_colors, *n_sites),
            Space::Sector(_) => return Err(Error::DomainMismatch("restrict expects a full-space operator".into())),
        };
        let sector = Space::sector(n_colors, n_sites, weight)?;
        let Space::Sector(basis) = &sector else { unreachable!() };
        let in_sector = |k: usize| basis.lookup.get(&k).copied();
        for (r, row) in self.rows.iter().enumerate() {
            let row_in = in_sector(r).is_some();
            for (c, _) in row {
                if in_sector(*c).is_some() != row_in {
                    return Err(Error::NotBlockDiagonal {
                        row: self.space.state(r).to_string(),
                        col: self.space.state(*c).to_string(),
                    });
                }
            }
        }
        let rows = basis
            .states
            .iter()
            .map(|s| {
                self.rows[s.index(n_colors)]
                    .iter()
                    .map(|(c, v)| (basis.lookup[c], v.clone()))
                    .collect()
            })
            .map(canonical_row)
            .collect();
        Ok(Self { space: sector, rows })
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![S::zero(); self.dim()];
                for (c, v) in row {
                    dense[*c] = v.clone();
                }
                dense
            })
            .collect()
    }

    pub fn try_map<T: Scalar>(&self, f: impl Fn(&S) -> Result<T>) -> Result<ChainOperator<T>> {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|(c, v)| Ok((*c, f(v)?))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        ChainOperator::from_rows(self.space.clone(), rows)
    }

    /// Entrywise comparison; see [`Comparison`].
    pub fn compare(&self, other: &Self, tol: f64) -> Result<Comparison> {
        self.space.check_same(&other.space)?;
        let mut cmp = Comparison::default();
        for r in 0..self.dim() {
            let (ra, rb) = (&self.rows[r], &other.rows[r]);
            let (mut i, mut j) = (0, 0);
            let zero = S::zero();
            while i < ra.len() || j < rb.len() {
                let ca = ra.get(i).map(|e| e.0).unwrap_or(usize::MAX);
                let cb = rb.get(j).map(|e| e.0).unwrap_or(usize::MAX);
                let (c, a, b) = if ca == cb {
                    i += 1;
                    j += 1;
                    (ca, &ra[i - 1].1, &rb[j - 1].1)
                } else if ca < cb {
                    i += 1;
                    (ca, &ra[i - 1].1, &zero)
                } else {
                    j += 1;
                    (cb, &zero, &rb[j - 1].1)
                };
                let dev = relative_deviation(a, b);
                let agree = a.close_to(b, tol);
                if !agree || dev > cmp.residual {
                    let witness = format!(
                        "entry row {} col {}: {} vs {}",
                        self.space.state(r),
                        self.space.state(c),
                        a,
                        b
                    );
                    cmp.merge(Comparison { agree, residual: dev, witness: Some(witness) });
                }
            }
        }
        Ok(cmp)
    }

    /// Compares against `value · I`.
    pub fn compare_scalar(&self, value: &S, tol: f64) -> Result<Comparison> {
        self.compare(&Self::identity(self.space.clone()).scale(value), tol)
    }
}

/// Finitely supported dual vector, stored densely over its space.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector<S> {
    space: Space,
    comps: Vec<S>,
}

impl<S: Scalar> Covector<S> {
    pub fn new(space: Space, comps: Vec<S>) -> Result<Self> {
        if comps.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} components for dimension {}",
                comps.len(),
                space.dim()
            )));
        }
        Ok(Self { space, comps })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn components(&self) -> &[S] {
        &self.comps
    }

    pub fn get(&self, state: &BasisState) -> Option<&S> {
        self.space.position(state).map(|k| &self.comps[k])
    }

    /// `⟨w| A`.
    pub fn apply_left(&self, op: &ChainOperator<S>) -> Result<Self> {
        self.space.check_same(op.space())?;
        let mut out = vec![S::zero(); self.comps.len()];
        for (r, row) in op.rows().iter().enumerate() {
            let w = &self.comps[r];
            if w.is_zero() {
                continue;
            }
            for (c, a) in row {
                out[*c].mul_add_assign(w, a);
            }
        }
        Ok(Self { space: self.space.clone(), comps: out })
    }

    /// `⟨w|v⟩`.
    pub fn pair(&self, v: &[S]) -> Result<S> {
        if v.len() != self.comps.len() {
            return Err(Error::DimensionMismatch("covector/vector length".into()));
        }
        let mut acc = S::zero();
        for (w, x) in self.comps.iter().zip(v) {
            acc.mul_add_assign(w, x);
        }
        Ok(acc)
    }

    pub fn compare(&self, other: &Self, tol: f64) -> Result<Comparison> {
        self.space.check_same(&other.space)?;
        let mut cmp = Comparison::default();
        for (k, (a, b)) in self.comps.iter().zip(&other.comps).enumerate() {
            let dev = relative_deviation(a, b);
            let agree = a.close_to(b, tol);
            if !agree || dev > cmp.residual {
                let witness = format!("component {}: {} vs {}", self.space.state(k), a, b);
                cmp.merge(Comparison { agree, residual: dev, witness: Some(witness) });
            }
        }
        Ok(cmp)
    }
}

/// `⟨Ω| = Σ_J ⟨J|` over the space.
pub fn omega<S: Scalar>(space: &Space) -> Covector<S> {
    Covector { space: space.clone(), comps: vec![S::one(); space.dim()] }
}

/// `⟨Ω_q| = Σ_J q^{ℓ(J)} ⟨J|`.
pub fn omega_q<S: Scalar>(space: &Space, q: &S) -> Result<Covector<S>> {
    if q.is_zero() {
        return Err(Error::NonInvertibleQ);
    }
    let max_len = space.n_sites() * space.n_sites().saturating_sub(1) / 2;
    let mut powers = Vec::with_capacity(max_len + 1);
    let mut p = S::one();
    for _ in 0..=max_len {
        powers.push(p.clone());
        p = p * q.clone();
    }
    let comps = (0..space.dim()).map(|k| powers[inversion_length(&space.state(k))].clone()).collect();
    Ok(Covector { space: space.clone(), comps })
}

fn check_site(site: usize, n_sites: usize) -> Result<()> {
    if site == 0 || site > n_sites {
        return Err(Error::BadSite { site, n_sites });
    }
    Ok(())
}

/// Matrix unit `e_ab` on a single factor.
pub fn matrix_unit<S: Scalar>(n_colors: usize, a: usize, b: usize) -> Result<ChainOperator<S>> {
    for color in [a, b] {
        if color == 0 || color > n_colors {
            return Err(Error::BadColor { color, n_colors });
        }
    }
    ChainOperator::from_triplets(Space::full(n_colors, 1)?, [(a - 1, b - 1, S::one())])
}

/// Diagonal single-factor matrix `diag(values)`.
pub fn local_diagonal<S: Scalar>(values: &[S]) -> Result<ChainOperator<S>> {
    let space = Space::full(values.len(), 1)?;
    Ok(ChainOperator::diagonal(space, |s| values[s.letter(1) - 1].clone()))
}

/// Acts with a `k`-factor operator on the given sites (in order: the first
/// listed site is the most significant factor of `local`), identity elsewhere.
pub fn embed<S: Scalar>(local: &ChainOperator<S>, sites: &[usize], n_sites: usize) -> Result<ChainOperator<S>> {
    let n_colors = local.space().n_colors();
    let k = sites.len();
    match local.space() {
        Space::Full { n_sites: ls, .. } if *ls == k => {}
        _ => {
            return Err(Error::DimensionMismatch(format!(
                "local operator on {} factors embedded on {k} sites",
                local.space().n_sites()
            )))
        }
    }
    for (m, &s) in sites.iter().enumerate() {
        check_site(s, n_sites)?;
        if sites[..m].contains(&s) {
            return Err(Error::BadSite { site: s, n_sites });
        }
    }
    let space = Space::full(n_colors, n_sites)?;
    let weights: Vec<usize> = sites.iter().map(|&s| n_colors.pow((n_sites - s) as u32)).collect();
    let rows = (0..space.dim())
        .map(|r| {
            let digits: Vec<usize> = weights.iter().map(|w| (r / w) % n_colors).collect();
            let local_row = digits.iter().fold(0, |acc, d| acc * n_colors + d);
            let base = r - digits.iter().zip(&weights).map(|(d, w)| d * w).sum::<usize>();
            local.rows()[local_row]
                .iter()
                .map(|(lc, v)| {
                    let mut col = base;
                    let mut rest = *lc;
                    for w in weights.iter().rev() {
                        col += (rest % n_colors) * w;
                        rest /= n_colors;
                    }
                    (col, v.clone())
                })
                .collect()
        })
        .collect();
    ChainOperator::from_rows(space, rows)
}

/// `op^{(i)} = I^{⊗(i-1)} ⊗ op ⊗ I^{⊗(n-i)}`.
pub fn site_embed<S: Scalar>(op: &ChainOperator<S>, site: usize, n_sites: usize) -> Result<ChainOperator<S>> {
    embed(op, &[site], n_sites)
}

/// Two-factor permutation `P = Σ_ab e_ab ⊗ e_ba`.
pub fn local_permutation<S: Scalar>(n_colors: usize) -> Result<ChainOperator<S>> {
    let space = Space::full(n_colors, 2)?;
    let trip = (0..n_colors).flat_map(|a| (0..n_colors).map(move |b| (a * n_colors + b, b * n_colors + a, S::one())));
    ChainOperator::from_triplets(space, trip)
}

/// `P_ij`: swaps the letters at sites `i` and `j`.
pub fn permutation<S: Scalar>(n_colors: usize, i: usize, j: usize, n_sites: usize) -> Result<ChainOperator<S>> {
    if i == j {
        return Err(Error::BadSite { site: j, n_sites });
    }
    embed(&local_permutation(n_colors)?, &[i, j], n_sites)
}

/// Two-factor q-permutation: `e_a ⊗ e_b ↦ c · e_b ⊗ e_a` with `c = q` for
/// `a < b`, `q^{-1}` for `a > b`, `1` for `a = b`.
pub fn local_q_permutation<S: Scalar>(n_colors: usize, q: &S) -> Result<ChainOperator<S>> {
    let q_inv = q.inv().map_err(|_| Error::NonInvertibleQ)?;
    let space = Space::full(n_colors, 2)?;
    let mut trip = Vec::with_capacity(n_colors * n_colors);
    for a in 0..n_colors {
        for b in 0..n_colors {
            let c = match a.cmp(&b) {
                std::cmp::Ordering::Less => q.clone(),
                std::cmp::Ordering::Greater => q_inv.clone(),
                std::cmp::Ordering::Equal => S::one(),
            };
            // column e_a ⊗ e_b, row e_b ⊗ e_a
            trip.push((b * n_colors + a, a * n_colors + b, c));
        }
    }
    ChainOperator::from_triplets(space, trip)
}

/// `P^q_ij` with site `i` as the first factor.
pub fn q_permutation<S: Scalar>(n_colors: usize, i: usize, j: usize, q: &S, n_sites: usize) -> Result<ChainOperator<S>> {
    if i == j {
        return Err(Error::BadSite { site: j, n_sites });
    }
    embed(&local_q_permutation(n_colors, q)?, &[i, j], n_sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::ExactRational;
    use proptest::prelude::*;
    use std::collections::{HashSet, VecDeque};

    type Q = ExactRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d).unwrap()
    }

    fn st(letters: &[usize]) -> BasisState {
        BasisState(letters.to_vec())
    }

    #[test]
    fn enumerate_sector_examples() {
        let w = WeightSector::new(vec![2, 1]).unwrap();
        let states = enumerate_sector(2, 3, &w).unwrap();
        assert_eq!(states, vec![st(&[1, 1, 2]), st(&[1, 2, 1]), st(&[2, 1, 1])]);
        assert_eq!(w.dimension(), 3);

        let w = WeightSector::new(vec![2, 0]).unwrap();
        assert_eq!(enumerate_sector(2, 2, &w).unwrap(), vec![st(&[1, 1])]);

        // brute force: permutations of (1,2,3)
        let w = WeightSector::new(vec![1, 1, 1]).unwrap();
        let states = enumerate_sector(3, 3, &w).unwrap();
        let brute: Vec<_> = (0..27)
            .map(|k| BasisState::from_index(k, 3, 3))
            .filter(|s| s.weight(3) == w)
            .collect();
        assert_eq!(states, brute);
        assert_eq!(states.len(), 6);

        let bad = WeightSector::new(vec![2, 2]).unwrap();
        assert!(matches!(enumerate_sector(2, 3, &bad), Err(Error::BadWeight(_))));
    }

    #[test]
    fn sector_dimensions_sum_to_full_space() {
        for n_colors in 1..=3 {
            for n_sites in 1..=5 {
                let total: usize = all_sectors(n_colors, n_sites).iter().map(WeightSector::dimension).sum();
                assert_eq!(total, n_colors.pow(n_sites as u32));
                for w in all_sectors(n_colors, n_sites) {
                    assert_eq!(enumerate_sector(n_colors, n_sites, &w).unwrap().len(), w.dimension());
                }
            }
        }
        assert_eq!(all_sectors(2, 3).len(), 4);
        assert_eq!(all_sectors(2, 3)[0].counts(), &[3, 0]);
    }

    #[test]
    fn inversion_length_examples() {
        assert_eq!(inversion_length(&st(&[1, 2, 3])), 0);
        assert_eq!(inversion_length(&st(&[2, 1])), 1);
        assert_eq!(inversion_length(&st(&[2, 1, 2, 1])), 3);
    }

    /// Shortest path from the sorted word to `target` using adjacent swaps of
    /// an ascending pair.
    fn bfs_length(target: &BasisState) -> usize {
        let mut start = target.0.clone();
        start.sort();
        let mut seen = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([(start, 0)]);
        while let Some((w, d)) = queue.pop_front() {
            if w == target.0 {
                return d;
            }
            for k in 0..w.len() - 1 {
                if w[k] < w[k + 1] {
                    let mut next = w.clone();
                    next.swap(k, k + 1);
                    if seen.insert(next.clone()) {
                        queue.push_back((next, d + 1));
                    }
                }
            }
        }
        unreachable!("every rearrangement is reachable")
    }

    #[test]
    fn inversion_length_matches_shortest_transposition_path() {
        for n_colors in 1usize..=3 {
            for n_sites in 1..=5 {
                for k in 0..n_colors.pow(n_sites as u32) {
                    let s = BasisState::from_index(k, n_colors, n_sites);
                    assert_eq!(inversion_length(&s), bfs_length(&s), "{s}");
                }
            }
        }
    }

    #[test]
    fn index_round_trip_is_big_endian() {
        let s = st(&[2, 1, 3]);
        assert_eq!(s.index(3), 9 + 2);
        assert_eq!(BasisState::from_index(11, 3, 3), s);
    }

    #[test]
    fn site_embed_examples() {
        let e12 = matrix_unit::<Q>(2, 1, 2).unwrap();
        let op = site_embed(&e12, 1, 2).unwrap();
        let space = op.space().clone();
        for b in 1..=2 {
            let from = space.position(&st(&[2, b])).unwrap();
            let to = space.position(&st(&[1, b])).unwrap();
            assert_eq!(op.get(to, from), Q::one());
        }
        assert_eq!(op.nnz(), 2);

        let id1 = ChainOperator::<Q>::identity(Space::full(2, 1).unwrap());
        assert_eq!(site_embed(&id1, 2, 3).unwrap(), ChainOperator::identity(Space::full(2, 3).unwrap()));

        let g = local_diagonal(&[q(2, 1), q(3, 1)]).unwrap();
        let g2 = site_embed(&g, 2, 2).unwrap();
        let expect = ChainOperator::diagonal(Space::full(2, 2).unwrap(), |s| if s.letter(2) == 1 { q(2, 1) } else { q(3, 1) });
        assert_eq!(g2, expect);
        assert!(matches!(site_embed(&g, 3, 2), Err(Error::BadSite { .. })));
    }

    #[test]
    fn permutation_examples() {
        let p = permutation::<Q>(2, 1, 2, 2).unwrap();
        let sp = p.space().clone();
        let v: Vec<Q> = (0..4).map(|k| if k == sp.position(&st(&[1, 2])).unwrap() { Q::one() } else { Q::zero() }).collect();
        let out = p.apply(&v).unwrap();
        assert_eq!(out[sp.position(&st(&[2, 1])).unwrap()], Q::one());
        assert_eq!(p.compose(&p).unwrap(), ChainOperator::identity(sp));

        let p13 = permutation::<Q>(2, 1, 3, 3).unwrap();
        let om = omega::<Q>(p13.space());
        assert_eq!(om.apply_left(&p13).unwrap(), om);
        assert!(permutation::<Q>(2, 2, 2, 3).is_err());
    }

    #[test]
    fn q_permutation_examples() {
        let t = q(3, 2);
        let pq = q_permutation(2, 1, 2, &t, 2).unwrap();
        let sp = pq.space().clone();
        let pos = |l: &[usize]| sp.position(&st(l)).unwrap();
        assert_eq!(pq.get(pos(&[2, 1]), pos(&[1, 2])), t.clone());
        assert_eq!(pq.get(pos(&[1, 2]), pos(&[2, 1])), t.inv().unwrap());
        assert_eq!(pq.get(pos(&[2, 2]), pos(&[2, 2])), Q::one());

        assert_eq!(pq.compose(&pq).unwrap(), ChainOperator::identity(sp));
        assert_eq!(q_permutation(2, 1, 2, &Q::zero(), 2), Err(Error::NonInvertibleQ));
        assert_eq!(local_q_permutation::<Q>(2, &Q::one()).unwrap(), local_permutation(2).unwrap());
    }

    #[test]
    fn omega_examples() {
        let full = Space::full(2, 2).unwrap();
        assert_eq!(omega::<Q>(&full).components(), &[Q::one(), Q::one(), Q::one(), Q::one()]);
        let sector = Space::sector(2, 3, &WeightSector::new(vec![2, 1]).unwrap()).unwrap();
        assert_eq!(omega::<Q>(&sector).components().len(), 3);

        let qq = q(5, 3);
        let oq = omega_q(&full, &qq).unwrap();
        assert_eq!(oq.components(), &[Q::one(), Q::one(), qq.clone(), Q::one()]);
        assert_eq!(omega_q(&full, &Q::one()).unwrap(), omega(&full));
        assert_eq!(omega_q(&full, &Q::zero()), Err(Error::NonInvertibleQ));

        let two = q(2, 1);
        let full3 = Space::full(2, 3).unwrap();
        let oq = omega_q(&full3, &two).unwrap();
        for i in 2..=3 {
            let pq = q_permutation(2, i, i - 1, &two, 3).unwrap();
            assert_eq!(oq.apply_left(&pq).unwrap(), oq);
        }
    }

    #[test]
    fn compose_examples() {
        let p = permutation::<Q>(3, 1, 2, 2).unwrap();
        let id = ChainOperator::identity(p.space().clone());
        assert_eq!(p.compose(&id).unwrap(), p);
        assert_eq!(p.compose_with(&p, Execution::Sequential).unwrap(), id);
        let other = permutation::<Q>(2, 1, 2, 2).unwrap();
        assert!(matches!(p.compose(&other), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn restrict_examples() {
        let w = WeightSector::new(vec![2, 1]).unwrap();
        let space = Space::full(2, 3).unwrap();
        let m1 = ChainOperator::<Q>::diagonal(space.clone(), |s| Q::from_int(s.count(1) as i64));
        let r = m1.restrict(&w).unwrap();
        assert_eq!(r.dim(), 3);
        assert!(r.compare_scalar(&q(2, 1), 0.0).unwrap().agree);
        let id = ChainOperator::<Q>::identity(space.clone());
        assert_eq!(id.restrict(&w).unwrap(), ChainOperator::identity(Space::sector(2, 3, &w).unwrap()));

        let raise = site_embed(&matrix_unit::<Q>(2, 1, 2).unwrap(), 1, 3).unwrap();
        assert!(matches!(raise.restrict(&w), Err(Error::NotBlockDiagonal { .. })));
    }

    #[test]
    fn compare_reports_witness() {
        let space = Space::full(2, 1).unwrap();
        let a = ChainOperator::<Q>::identity(space.clone());
        let b = a.scale(&q(2, 1));
        let cmp = a.compare(&b, 0.0).unwrap();
        assert!(!cmp.agree);
        assert!(cmp.residual > 0.0);
        assert!(cmp.witness.unwrap().contains("row (1)"));
    }

    fn random_op(seed: Vec<(usize, usize, i64, i64)>, dim_space: Space) -> ChainOperator<Q> {
        let dim = dim_space.dim();
        ChainOperator::from_triplets(dim_space, seed.into_iter().map(|(r, c, n, d)| (r % dim, c % dim, q(n, d)))).unwrap()
    }

    fn triplets() -> impl Strategy<Value = Vec<(usize, usize, i64, i64)>> {
        proptest::collection::vec((0usize..27, 0usize..27, -9i64..9, 1i64..6), 0..40)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn compose_is_associative(a in triplets(), b in triplets(), c in triplets()) {
            let sp = Space::full(3, 3).unwrap();
            let (a, b, c) = (random_op(a, sp.clone()), random_op(b, sp.clone()), random_op(c, sp));
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn q_permutation_reverses_with_inverse(n in 1i64..20, d in 1i64..20, sign in proptest::bool::ANY) {
            let qq = q(if sign { n } else { -n }, d);
            for n_colors in 2..=3 {
                let lhs = q_permutation(n_colors, 1, 3, &qq, 3).unwrap();
                let rhs = q_permutation(n_colors, 3, 1, &qq.inv().unwrap(), 3).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn omega_q_invariant_under_adjacent_q_permutations(n in 1i64..20, d in 1i64..20) {
            let qq = q(n, d);
            let space = Space::full(3, 4).unwrap();
            let oq = omega_q(&space, &qq).unwrap();
            for i in 2..=4 {
                let pq = q_permutation(3, i, i - 1, &qq, 4).unwrap();
                prop_assert_eq!(oq.apply_left(&pq).unwrap(), oq.clone());
            }
        }
    }
}
