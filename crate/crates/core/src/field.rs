//! Exact arithmetic in binary-extension fields GF(2^m), m in {1, 4, 8, 16},
//! plus the dense matrix kernel (rank, solve) used by the coding and
//! secrecy-verification layers.
//!
//! # Representation
//!
//! A symbol is the bit pattern of a polynomial over GF(2) of degree < m,
//! stored in a `u16`. Addition is XOR. Multiplication reduces the carry-less
//! product by a fixed irreducible polynomial, via log/antilog tables for
//! m <= 8 and shift-reduce for m = 16.
//!
//! Reduction polynomials are pinned per degree so that encoded transcripts
//! are bit-identical across implementations; custom polynomials are accepted
//! but checked for irreducibility by exhaustive trial division.

use crate::rng::SplitMix64;
use thiserror::Error;

/// Extension degrees this crate supports.
pub const SUPPORTED_DEGREES: &[u32] = &[1, 4, 8, 16];

/// Verification work budget (field multiplications) for [`MdsMatrix`]-style
/// rank checks; shared default for construction-time self checks.
pub(crate) const VERIFY_BUDGET: usize = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("unsupported extension degree {0} (supported: 1, 4, 8, 16)")]
    UnsupportedDegree(u32),
    #[error("polynomial {poly:#x} does not have degree {m}")]
    WrongPolynomialDegree { poly: u32, m: u32 },
    #[error("polynomial {poly:#x} is reducible over GF(2)")]
    ReduciblePolynomial { poly: u32 },
    #[error("value {value} out of range for field of order {order}")]
    ValueOutOfRange { value: u32, order: u32 },
    #[error("matrix expects {expected} entries, got {got}")]
    EntryCountMismatch { expected: usize, got: usize },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Degree and reduction polynomial of a GF(2^m) field. `Copy`, so it can be
/// embedded in schemes and schedules; the table-backed [`Field`] is built
/// from it on demand.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldSpec {
    m: u32,
    poly: u32,
}

fn poly_degree(p: u32) -> u32 {
    31 - p.leading_zeros()
}

/// Remainder of carry-less division of `a` by `b` over GF(2).
fn poly_mod(mut a: u64, b: u64) -> u64 {
    let db = 63 - b.leading_zeros();
    while a != 0 {
        let da = 63 - a.leading_zeros();
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

fn is_irreducible(poly: u32, m: u32) -> bool {
    // Trial division by every polynomial of degree 1 ..= m/2.
    for d in 1..=(m / 2) {
        for q in (1u64 << d)..(1u64 << (d + 1)) {
            if poly_mod(poly as u64, q) == 0 {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    pub fn new(m: u32, poly: u32) -> Result<Self, FieldError> {
        if !SUPPORTED_DEGREES.contains(&m) {
            return Err(FieldError::UnsupportedDegree(m));
        }
        if poly_degree(poly) != m {
            return Err(FieldError::WrongPolynomialDegree { poly, m });
        }
        if !is_irreducible(poly, m) {
            return Err(FieldError::ReduciblePolynomial { poly });
        }
        Ok(FieldSpec { m, poly })
    }

    /// The pinned conventional polynomial for each supported degree:
    /// x+1, x^4+x+1, x^8+x^4+x^3+x+1 (0x11B), x^16+x^12+x^3+x+1 (0x1100B).
    pub fn standard(m: u32) -> Result<Self, FieldError> {
        let poly = match m {
            1 => 0x3,
            4 => 0x13,
            8 => 0x11B,
            16 => 0x1100B,
            other => return Err(FieldError::UnsupportedDegree(other)),
        };
        FieldSpec::new(m, poly)
    }

    pub fn degree(self) -> u32 {
        self.m
    }

    pub fn reduction_polynomial(self) -> u32 {
        self.poly
    }

    /// Field order q = 2^m.
    pub fn order(self) -> u32 {
        1 << self.m
    }

    /// Hex digits needed to print one symbol of this field.
    pub fn hex_width(self) -> usize {
        self.m.div_ceil(4) as usize
    }
}

/// One field element; meaningful only together with a [`FieldSpec`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Symbol(pub u16);

impl std::fmt::Debug for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Symbol({:#x})", self.0)
    }
}

impl std::fmt::Display for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Arithmetic context for one field: spec plus multiplication tables.
pub struct Field {
    spec: FieldSpec,
    log: Vec<u16>,
    exp: Vec<u16>,
}

// Shift-reduce multiplication: accumulate a conditionally while the
// multiplicand shifts, reducing by the field polynomial whenever it would
// pass degree m, so the product never leaves the field.
fn clmul_reduce(a: u32, b: u32, poly: u32, m: u32) -> u32 {
    let mask = (1u32 << m) - 1;
    let high = 1u32 << (m - 1);
    let low_poly = poly & mask;
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        let carry = a & high != 0;
        a = (a << 1) & mask;
        if carry {
            a ^= low_poly;
        }
    }
    acc
}

impl Field {
    /// Builds the arithmetic context. Log/antilog tables are generated for
    /// 2 <= m <= 8 from the smallest primitive element; GF(2) needs none and
    /// GF(2^16) multiplies by shift-reduce.
    pub fn new(spec: FieldSpec) -> Field {
        let q = spec.order();
        if spec.m > 8 || q <= 2 {
            return Field {
                spec,
                log: Vec::new(),
                exp: Vec::new(),
            };
        }
        // Find the smallest generator of the multiplicative group.
        let group = (q - 1) as usize;
        'gen: for g in 2..q {
            let mut exp = vec![0u16; 2 * group];
            let mut log = vec![0u16; q as usize];
            let mut val = 1u32;
            for i in 0..group {
                if val == 1 && i > 0 {
                    continue 'gen; // order of g divides i < q-1
                }
                exp[i] = val as u16;
                exp[i + group] = val as u16;
                log[val as usize] = i as u16;
                val = clmul_reduce(val, g, spec.poly, spec.m);
            }
            if val == 1 {
                return Field { spec, log, exp };
            }
        }
        unreachable!("every finite field has a primitive element");
    }

    pub fn standard(m: u32) -> Result<Field, FieldError> {
        Ok(Field::new(FieldSpec::standard(m)?))
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> u32 {
        self.spec.order()
    }

    pub fn zero(&self) -> Symbol {
        Symbol(0)
    }

    pub fn one(&self) -> Symbol {
        Symbol(1)
    }

    /// Range-checked symbol construction.
    pub fn symbol(&self, value: u32) -> Result<Symbol, FieldError> {
        if value < self.order() {
            Ok(Symbol(value as u16))
        } else {
            Err(FieldError::ValueOutOfRange {
                value,
                order: self.order(),
            })
        }
    }

    pub fn contains(&self, s: Symbol) -> bool {
        (s.0 as u32) < self.order()
    }

    fn check(&self, s: Symbol) {
        assert!(
            self.contains(s),
            "symbol {} outside field of order {}",
            s.0,
            self.order()
        );
    }

    /// Field addition: XOR of representations (characteristic 2).
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        self.check(a);
        self.check(b);
        Symbol(a.0 ^ b.0)
    }

    /// Subtraction coincides with addition in characteristic 2.
    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add(a, b)
    }

    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        self.check(a);
        self.check(b);
        if a.0 == 0 || b.0 == 0 {
            return Symbol(0);
        }
        if self.exp.is_empty() {
            return Symbol(
                clmul_reduce(a.0 as u32, b.0 as u32, self.spec.poly, self.spec.m) as u16,
            );
        }
        let idx = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        Symbol(self.exp[idx])
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: Symbol) -> Symbol {
        self.check(a);
        assert!(a.0 != 0, "zero has no multiplicative inverse");
        if !self.exp.is_empty() {
            let group = (self.order() - 1) as usize;
            let l = self.log[a.0 as usize] as usize;
            return Symbol(self.exp[(group - l) % group]);
        }
        // a^(q-2) by square-and-multiply.
        self.pow(a, self.order() - 2)
    }

    pub fn div(&self, a: Symbol, b: Symbol) -> Symbol {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Symbol, mut e: u32) -> Symbol {
        self.check(a);
        let mut base = a;
        let mut acc = Symbol(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Uniformly random symbol from the seeded generator.
    pub fn random(&self, rng: &mut SplitMix64) -> Symbol {
        Symbol(rng.below(self.order() as u64) as u16)
    }
}

/// Dense row-major matrix over one field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<Symbol>,
}

impl Matrix {
    pub fn new(
        spec: FieldSpec,
        rows: usize,
        cols: usize,
        entries: Vec<Symbol>,
    ) -> Result<Matrix, FieldError> {
        if entries.len() != rows * cols {
            return Err(FieldError::EntryCountMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        let order = spec.order();
        for s in &entries {
            if (s.0 as u32) >= order {
                return Err(FieldError::ValueOutOfRange {
                    value: s.0 as u32,
                    order,
                });
            }
        }
        Ok(Matrix {
            spec,
            rows,
            cols,
            entries,
        })
    }

    pub fn zero(spec: FieldSpec, rows: usize, cols: usize) -> Matrix {
        Matrix {
            spec,
            rows,
            cols,
            entries: vec![Symbol(0); rows * cols],
        }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Matrix {
        let mut m = Matrix::zero(spec, n, n);
        for i in 0..n {
            m.set(i, i, Symbol(1));
        }
        m
    }

    pub fn from_fn(
        spec: FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Symbol,
    ) -> Matrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let s = f(r, c);
                assert!((s.0 as u32) < spec.order(), "entry out of field range");
                entries.push(s);
            }
        }
        Matrix {
            spec,
            rows,
            cols,
            entries,
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Symbol {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Symbol) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Symbol] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// Horizontal concatenation `[self | right]`.
    pub fn hstack(&self, right: &Matrix) -> Result<Matrix, FieldError> {
        if self.spec != right.spec {
            return Err(FieldError::FieldMismatch);
        }
        if self.rows != right.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "hstack of {}x{} with {}x{}",
                self.rows, self.cols, right.rows, right.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * (self.cols + right.cols));
        for r in 0..self.rows {
            entries.extend_from_slice(self.row(r));
            entries.extend_from_slice(right.row(r));
        }
        Ok(Matrix {
            spec: self.spec,
            rows: self.rows,
            cols: self.cols + right.cols,
            entries,
        })
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.spec, self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// New matrix keeping only the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.spec, self.rows, cols.len(), |r, c| {
            self.get(r, cols[c])
        })
    }
}

impl Field {
    pub fn mat_mul(&self, a: &Matrix, b: &Matrix) -> Result<Matrix, FieldError> {
        if a.spec != self.spec || b.spec != self.spec {
            return Err(FieldError::FieldMismatch);
        }
        if a.cols != b.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "product of {}x{} with {}x{}",
                a.rows, a.cols, b.rows, b.cols
            )));
        }
        let mut out = Matrix::zero(self.spec, a.rows, b.cols);
        for r in 0..a.rows {
            for k in 0..a.cols {
                let av = a.get(r, k);
                if av.0 == 0 {
                    continue;
                }
                for c in 0..b.cols {
                    let t = self.mul(av, b.get(k, c));
                    out.set(r, c, self.add(out.get(r, c), t));
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, a: &Matrix, x: &[Symbol]) -> Vec<Symbol> {
        assert_eq!(a.spec, self.spec, "matrix from a different field");
        assert_eq!(a.cols, x.len(), "vector length mismatch");
        (0..a.rows)
            .map(|r| {
                let mut acc = Symbol(0);
                for c in 0..a.cols {
                    acc = self.add(acc, self.mul(a.get(r, c), x[c]));
                }
                acc
            })
            .collect()
    }

    /// Row rank by Gaussian elimination.
    pub fn rank(&self, m: &Matrix) -> usize {
        assert_eq!(m.spec, self.spec, "matrix from a different field");
        let mut work = m.entries.clone();
        let (rows, cols) = (m.rows, m.cols);
        let at = |w: &Vec<Symbol>, r: usize, c: usize| w[r * cols + c];
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let pivot = (rank..rows).find(|&r| at(&work, r, col).0 != 0);
            let Some(p) = pivot else { continue };
            for c in 0..cols {
                work.swap(rank * cols + c, p * cols + c);
            }
            let inv = self.inv(at(&work, rank, col));
            for r in (rank + 1)..rows {
                let factor = at(&work, r, col);
                if factor.0 == 0 {
                    continue;
                }
                let scale = self.mul(factor, inv);
                for c in col..cols {
                    let sub = self.mul(scale, at(&work, rank, c));
                    work[r * cols + c] = self.add(at(&work, r, c), sub);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solves `A x = b`. Returns `None` when the system is inconsistent.
    /// For consistent underdetermined systems the free variables are set to
    /// zero, so the returned `x` always satisfies `A x = b`.
    pub fn solve(&self, a: &Matrix, b: &[Symbol]) -> Option<Vec<Symbol>> {
        assert_eq!(a.spec, self.spec, "matrix from a different field");
        assert_eq!(a.rows, b.len(), "rhs length mismatch");
        let (rows, cols) = (a.rows, a.cols);
        let width = cols + 1;
        let mut work: Vec<Symbol> = Vec::with_capacity(rows * width);
        for r in 0..rows {
            work.extend_from_slice(a.row(r));
            work.push(b[r]);
        }
        let at = |w: &Vec<Symbol>, r: usize, c: usize| w[r * width + c];
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&r| at(&work, r, col).0 != 0) else {
                continue;
            };
            for c in 0..width {
                work.swap(rank * width + c, p * width + c);
            }
            let inv = self.inv(at(&work, rank, col));
            for c in col..width {
                work[rank * width + c] = self.mul(at(&work, rank, c), inv);
            }
            for r in 0..rows {
                if r == rank {
                    continue;
                }
                let factor = at(&work, r, col);
                if factor.0 == 0 {
                    continue;
                }
                for c in col..width {
                    let sub = self.mul(factor, at(&work, rank, c));
                    work[r * width + c] = self.add(at(&work, r, c), sub);
                }
            }
            pivot_cols.push(col);
            rank += 1;
        }
        // Inconsistent when a zero row has nonzero rhs.
        for r in rank..rows {
            if at(&work, r, cols).0 != 0 {
                return None;
            }
        }
        let mut x = vec![Symbol(0); cols];
        for (i, &col) in pivot_cols.iter().enumerate() {
            x[col] = at(&work, i, cols);
        }
        Some(x)
    }
}
