//! Spin-1/2 chain Hilbert spaces and term-list Hamiltonians.
//!
//! Basis convention: site `i` maps to bit `i` (site 0 = least significant
//! bit), and a set bit encodes spin value +1. Basis states are enumerated in
//! ascending integer order. Hamiltonians are sums of weighted Pauli strings;
//! the models built here (transverse-field Ising, J1-J2 Heisenberg) carry an
//! even number of Y factors per term, so every matrix element is real.

mod solve;

pub use solve::GroundStateSolution;

use crate::error::{Error, Result};
use crate::scalar::{Field, RealScalar};
use num_traits::Float;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest chain the in-memory solvers accept.
pub const MAX_SITES: usize = 16;

/// One computational-basis state of an N-site chain.
///
/// Bit `i` set means site `i` carries spin value +1, clear means −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    bits: usize,
    n_sites: usize,
}

impl SpinConfiguration {
    pub fn new(bits: usize, n_sites: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(Error::InvalidSystem(format!(
                "n_sites must be in 1..={MAX_SITES}, got {n_sites}"
            )));
        }
        if bits >> n_sites != 0 {
            return Err(Error::Parameter(format!(
                "basis index {bits} out of range for {n_sites} sites"
            )));
        }
        Ok(Self { bits, n_sites })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Spin value at `site`: +1 for a set bit, −1 otherwise.
    pub fn spin(&self, site: usize) -> i8 {
        debug_assert!(site < self.n_sites);
        if self.bits >> site & 1 == 1 {
            1
        } else {
            -1
        }
    }

    /// Spin values as ±1 in site order.
    pub fn spins<R: RealScalar>(&self) -> Vec<R> {
        (0..self.n_sites)
            .map(|i| {
                if self.spin(i) > 0 {
                    R::one()
                } else {
                    -R::one()
                }
            })
            .collect()
    }
}

/// The full computational basis of an N-site spin-1/2 chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertBasis {
    n_sites: usize,
}

impl HilbertBasis {
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(Error::Capacity {
                n_sites,
                limit: MAX_SITES,
            });
        }
        Ok(Self { n_sites })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_sites
    }

    pub fn configuration(&self, index: usize) -> SpinConfiguration {
        debug_assert!(index < self.dimension());
        SpinConfiguration {
            bits: index,
            n_sites: self.n_sites,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = SpinConfiguration> + '_ {
        (0..self.dimension()).map(|i| self.configuration(i))
    }

    /// Dense ±1 table, one row of `n_sites` entries per basis state.
    /// Hot loops index it as `table[index * n_sites + site]`.
    pub fn spin_table<R: RealScalar>(&self) -> Vec<R> {
        let n = self.n_sites;
        let mut table = Vec::with_capacity(self.dimension() * n);
        for bits in 0..self.dimension() {
            for site in 0..n {
                table.push(if bits >> site & 1 == 1 {
                    R::one()
                } else {
                    -R::one()
                });
            }
        }
        table
    }
}

/// Chain boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Periodic => write!(f, "periodic"),
            Boundary::Open => write!(f, "open"),
        }
    }
}

/// Single-site Pauli symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn symbol(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }
}

/// A length-N string of per-site Pauli symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliString(Vec<PauliOp>);

impl PauliString {
    pub fn new(ops: Vec<PauliOp>) -> Self {
        Self(ops)
    }

    /// Identity on every site except the given (site, op) entries.
    pub fn from_sites(n_sites: usize, entries: &[(usize, PauliOp)]) -> Self {
        let mut ops = vec![PauliOp::I; n_sites];
        for &(site, op) in entries {
            ops[site] = op;
        }
        Self(ops)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ops(&self) -> &[PauliOp] {
        &self.0
    }

    fn y_count(&self) -> usize {
        self.0.iter().filter(|&&op| op == PauliOp::Y).count()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.0 {
            write!(f, "{}", op.symbol())?;
        }
        Ok(())
    }
}

/// One weighted Pauli string: `coefficient · P`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm<R> {
    pub coefficient: R,
    pub string: PauliString,
}

/// Bit-level compilation of a term for fast application.
#[derive(Debug, Clone, Copy)]
struct CompiledTerm<R> {
    /// Bits flipped by the term (X and Y sites).
    flip_mask: usize,
    /// Bits contributing a ±1 diagonal factor (Z and Y sites).
    sign_mask: usize,
    /// coefficient × i^{#Y}; real because #Y is even.
    base: R,
}

/// A term-list spin Hamiltonian with real matrix elements.
#[derive(Debug, Clone)]
pub struct HamiltonianOperator<R> {
    n_sites: usize,
    boundary: Boundary,
    terms: Vec<HamiltonianTerm<R>>,
    compiled: Vec<CompiledTerm<R>>,
}

impl<R: RealScalar> HamiltonianOperator<R> {
    /// Builds an operator from explicit terms, validating string lengths and
    /// the even-Y-count requirement that keeps all matrix elements real.
    pub fn new(
        n_sites: usize,
        boundary: Boundary,
        terms: Vec<HamiltonianTerm<R>>,
    ) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(Error::InvalidSystem(format!(
                "n_sites must be in 1..={MAX_SITES}, got {n_sites}"
            )));
        }
        let mut compiled = Vec::with_capacity(terms.len());
        for term in &terms {
            if term.string.len() != n_sites {
                return Err(Error::InvalidTerm(format!(
                    "operator string {} has length {}, expected {n_sites}",
                    term.string,
                    term.string.len()
                )));
            }
            if !Float::is_finite(term.coefficient) {
                return Err(Error::InvalidTerm(format!(
                    "non-finite coefficient on {}",
                    term.string
                )));
            }
            let y_count = term.string.y_count();
            if y_count % 2 != 0 {
                return Err(Error::InvalidTerm(format!(
                    "term {} has odd Y count; matrix elements would be imaginary",
                    term.string
                )));
            }
            let mut flip_mask = 0usize;
            let mut sign_mask = 0usize;
            for (site, &op) in term.string.ops().iter().enumerate() {
                match op {
                    PauliOp::I => {}
                    PauliOp::X => flip_mask |= 1 << site,
                    PauliOp::Z => sign_mask |= 1 << site,
                    PauliOp::Y => {
                        flip_mask |= 1 << site;
                        sign_mask |= 1 << site;
                    }
                }
            }
            // i^{#Y} with #Y even is ±1.
            let phase = if y_count % 4 == 0 { R::one() } else { -R::one() };
            compiled.push(CompiledTerm {
                flip_mask,
                sign_mask,
                base: term.coefficient * phase,
            });
        }
        Ok(Self {
            n_sites,
            boundary,
            terms,
            compiled,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_sites
    }

    pub fn terms(&self) -> &[HamiltonianTerm<R>] {
        &self.terms
    }

    pub fn basis(&self) -> HilbertBasis {
        HilbertBasis { n_sites: self.n_sites }
    }

    /// H·state. The amplitude type may be the coefficient scalar itself or a
    /// complex field over it; the operator's matrix elements are real either
    /// way. The per-entry summation order is fixed, so results are
    /// bit-identical regardless of internal parallelism.
    pub fn apply<T: Field<Real = R>>(&self, state: &[T]) -> Result<Vec<T>> {
        let dim = self.dimension();
        if state.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: state.len(),
            });
        }
        let mut out = vec![T::zero(); dim];
        let fill = |chunk_start: usize, out_chunk: &mut [T]| {
            for (offset, slot) in out_chunk.iter_mut().enumerate() {
                let row = chunk_start + offset;
                let mut acc = T::zero();
                for term in &self.compiled {
                    let col = row ^ term.flip_mask;
                    // Sign = product of ±1 spin values on the masked sites of
                    // the source state (clear bit ⇒ −1).
                    let neg = (!col & term.sign_mask).count_ones() & 1 == 1;
                    let factor = if neg { -term.base } else { term.base };
                    acc += state[col].scale(factor);
                }
                *slot = acc;
            }
        };
        // Fixed chunk size keeps the work deterministic and lets rayon help
        // on the larger bases.
        const CHUNK: usize = 512;
        if dim >= 2 * CHUNK && self.compiled.len() * dim > 1 << 14 {
            out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
                fill(ci * CHUNK, chunk);
            });
        } else {
            fill(0, &mut out);
        }
        Ok(out)
    }

    /// ⟨bra|H|ket⟩ without normalization.
    pub fn matrix_element<T: Field<Real = R>>(&self, bra: &[T], ket: &[T]) -> Result<T> {
        let h_ket = self.apply(ket)?;
        Ok(bra
            .iter()
            .zip(h_ket.iter())
            .map(|(b, hk)| b.conj() * *hk)
            .sum())
    }
}

/// Transverse-field Ising chain: −J Σ Z_i Z_{i+1} − h Σ X_i.
pub fn build_tfim<R: RealScalar>(
    n_sites: usize,
    j: R,
    h: R,
    boundary: Boundary,
) -> Result<HamiltonianOperator<R>> {
    if n_sites < 2 {
        return Err(Error::InvalidSystem(format!(
            "TFIM needs at least 2 sites, got {n_sites}"
        )));
    }
    if n_sites > MAX_SITES {
        return Err(Error::InvalidSystem(format!(
            "TFIM supports at most {MAX_SITES} sites, got {n_sites}"
        )));
    }
    let mut terms = Vec::new();
    if j != R::zero() {
        for (a, b) in bond_pairs(n_sites, 1, boundary) {
            terms.push(HamiltonianTerm {
                coefficient: -j,
                string: PauliString::from_sites(n_sites, &[(a, PauliOp::Z), (b, PauliOp::Z)]),
            });
        }
    }
    if h != R::zero() {
        for site in 0..n_sites {
            terms.push(HamiltonianTerm {
                coefficient: -h,
                string: PauliString::from_sites(n_sites, &[(site, PauliOp::X)]),
            });
        }
    }
    HamiltonianOperator::new(n_sites, boundary, terms)
}

/// J1-J2 Heisenberg chain: J1 Σ S_i·S_{i+1} + J2 Σ S_i·S_{i+2}, with
/// S = σ/2, so each bond expands to (J/4)(X_iX_j + Y_iY_j + Z_iZ_j).
pub fn build_j1j2<R: RealScalar>(
    n_sites: usize,
    j1: R,
    j2: R,
    boundary: Boundary,
) -> Result<HamiltonianOperator<R>> {
    if n_sites < 4 {
        return Err(Error::InvalidSystem(format!(
            "J1-J2 needs at least 4 sites for distinct next-nearest bonds, got {n_sites}"
        )));
    }
    if n_sites > MAX_SITES {
        return Err(Error::InvalidSystem(format!(
            "J1-J2 supports at most {MAX_SITES} sites, got {n_sites}"
        )));
    }
    let quarter = R::of(0.25);
    let mut terms = Vec::new();
    for (coupling, range) in [(j1, 1usize), (j2, 2usize)] {
        if coupling == R::zero() {
            continue;
        }
        for (a, b) in bond_pairs(n_sites, range, boundary) {
            for op in [PauliOp::X, PauliOp::Y, PauliOp::Z] {
                terms.push(HamiltonianTerm {
                    coefficient: coupling * quarter,
                    string: PauliString::from_sites(n_sites, &[(a, op), (b, op)]),
                });
            }
        }
    }
    HamiltonianOperator::new(n_sites, boundary, terms)
}

/// Site pairs (i, i+range) honoring the boundary. Periodic chains include
/// the wrap-around bonds; open chains stop at the edge.
fn bond_pairs(n_sites: usize, range: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let last = match boundary {
        Boundary::Periodic => n_sites,
        Boundary::Open => n_sites.saturating_sub(range),
    };
    (0..last).map(|i| (i, (i + range) % n_sites)).collect()
}
