//! Classical parameters with `alpha = b - 1`, the eight matrices
//! `A, A*, B, B*, K, K*, Phi, Psi`, and the q-tetrahedron generator action.
//!
//! Every matrix except `A` and `A*` is diagonal in one of the four split
//! bases, so it is applied as `C diag(q^e) C^-1` and never stored densely in
//! exact mode. Identities are checked on blocks of vectors: seeded probes or
//! the full standard basis.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

use crate::field::{FieldError, FieldMode, GroundField, QSign, Scalar};
use crate::graphs::{DistanceData, IntersectionData};
use crate::linalg::Mat;
use crate::report::{Check, Tally};
use crate::scheme::{DualData, SchemeData};
use crate::split::{Kind, SplitSystem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QTetError {
    #[error("diameter {0} is below 3")]
    DiameterTooSmall(usize),
    #[error("c_1 = {0}, expected 1")]
    C1NotOne(usize),
    #[error("no classical parameters with alpha = b - 1: {0}")]
    NotClassicalAlphaBMinusOne(String),
    #[error("only b = 1 fits the intersection numbers, and b = 1 is excluded: {0}")]
    BEqualsOne(String),
    #[error("both candidate values of b survive: {0:?}")]
    Ambiguous(Vec<i64>),
    #[error("eigenvalues do not fit alpha_0 + alpha_1 q^(D-2i): {0}")]
    AlphaFitFailure(String),
    #[error("field b = {field} does not match classical b = {classical}")]
    FieldMismatch { field: i64, classical: i64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `(D, b, alpha, beta)` with `alpha = b - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Classical {
    pub d: usize,
    pub b: i64,
    pub alpha: i64,
    pub beta: Rational,
}

impl fmt::Display for Classical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.d, self.b, self.alpha, self.beta)
    }
}

/// One root of `b^2 + b - c_2 = 0` and why it was kept or dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub b: i64,
    pub beta: Option<Rational>,
    pub rejection: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub candidates: Vec<Candidate>,
    pub result: Result<Classical, QTetError>,
}

impl Detection {
    pub fn to_check(&self) -> Check {
        let summary = self
            .candidates
            .iter()
            .map(|c| match &c.rejection {
                None => format!("b = {} accepted", c.b),
                Some(r) => format!("b = {} rejected: {r}", c.b),
            })
            .collect::<Vec<_>>()
            .join("; ");
        let mut check = Check::boolean(
            "qtet.classical_parameters",
            "c_i = b^(i-1) (b^i - 1)/(b - 1), b_i = (beta + 1 - b^i)(b^D - b^i)/(b - 1), alpha = b - 1",
            self.result.is_ok(),
            || summary.clone(),
        );
        if self.result.is_ok() {
            check.witness = Some(summary);
        }
        check
    }
}

fn rpow(b: i64, e: usize) -> Rational {
    let mut r = Rational::from(1);
    for _ in 0..e {
        r *= b;
    }
    r
}

/// Tries both roots of `b^2 + b - c_2 = 0` against the closed forms of the
/// intersection numbers.
pub fn detect_classical(inter: &IntersectionData) -> Detection {
    let d = inter.diameter();
    let fail = |e| Detection {
        candidates: Vec::new(),
        result: Err(e),
    };
    if d < 3 {
        return fail(QTetError::DiameterTooSmall(d));
    }
    if inter.c[1] != 1 {
        return fail(QTetError::C1NotOne(inter.c[1]));
    }
    let c2 = inter.c[2] as i64;
    let disc = 1 + 4 * c2;
    let s = (disc as f64).sqrt().round() as i64;
    let mut roots = Vec::new();
    if s * s == disc {
        for r in [(-1 + s) / 2, (-1 - s) / 2] {
            if (-1 + s) % 2 == 0 && !roots.contains(&r) {
                roots.push(r);
            }
        }
    }
    let mut candidates = Vec::new();
    for b in roots {
        candidates.push(test_candidate(inter, b));
    }
    let survivors: Vec<&Candidate> = candidates.iter().filter(|c| c.rejection.is_none()).collect();
    let summary = candidates
        .iter()
        .map(|c| format!("b = {}: {}", c.b, c.rejection.as_deref().unwrap_or("fits")))
        .collect::<Vec<_>>()
        .join("; ");
    let result = match survivors.as_slice() {
        [] if candidates.iter().any(|c| c.b == 1) => Err(QTetError::BEqualsOne(summary)),
        [] if candidates.is_empty() => Err(QTetError::NotClassicalAlphaBMinusOne(format!(
            "1 + 4 c_2 = {disc} is not a square"
        ))),
        [] => Err(QTetError::NotClassicalAlphaBMinusOne(summary)),
        [one] => Ok(Classical {
            d,
            b: one.b,
            alpha: one.b - 1,
            beta: one.beta.clone().expect("accepted candidates carry beta"),
        }),
        many => Err(QTetError::Ambiguous(many.iter().map(|c| c.b).collect())),
    };
    Detection { candidates, result }
}

fn test_candidate(inter: &IntersectionData, b: i64) -> Candidate {
    let d = inter.diameter();
    let reject = |why: String, beta: Option<Rational>| Candidate {
        b,
        beta,
        rejection: Some(why),
    };
    if b == 1 {
        return reject("b = 1 is excluded".into(), None);
    }
    if b == 0 || b == -1 {
        return reject(format!("b = {b} is excluded"), None);
    }
    let bm1 = Rational::from(b - 1);
    let bd = rpow(b, d);
    let beta = Rational::from(inter.b[0] as i64) * &bm1 / (bd.clone() - 1u32);
    for i in 1..=d {
        let c = rpow(b, i - 1) * (rpow(b, i) - 1u32) / &bm1;
        if c != inter.c[i] as i64 {
            return reject(format!("c_{i} would be {c}, graph has {}", inter.c[i]), Some(beta));
        }
    }
    for i in 0..=d {
        let bi = (beta.clone() + 1u32 - rpow(b, i)) * (bd.clone() - rpow(b, i)) / &bm1;
        if bi != inter.b[i] as i64 {
            return reject(format!("b_{i} would be {bi}, graph has {}", inter.b[i]), Some(beta));
        }
    }
    Candidate {
        b,
        beta: Some(beta),
        rejection: None,
    }
}

/// Classical parameters together with the field and the fit
/// `theta_i = theta*_i = alpha_0 + alpha_1 q^(D-2i)`.
#[derive(Debug, Clone)]
pub struct QParams {
    pub classical: Classical,
    pub field: GroundField,
    pub alpha0: Scalar,
    pub alpha1: Scalar,
}

impl QParams {
    /// Fits `alpha_0, alpha_1` from `theta_0, theta_1` and checks every
    /// `theta_i` and `theta*_i` against the same pair.
    pub fn fit(
        classical: &Classical,
        field: &GroundField,
        theta: &[Scalar],
        theta_star: &[Scalar],
    ) -> Result<Self, QTetError> {
        if field.b() != classical.b {
            return Err(QTetError::FieldMismatch {
                field: field.b(),
                classical: classical.b,
            });
        }
        let d = classical.d as i64;
        let alpha1 = (&theta[0] - &theta[1]).checked_div(&(&field.qpow(d) - &field.qpow(d - 2)))?;
        let alpha0 = &theta[0] - &(&alpha1 * &field.qpow(d));
        if alpha1.is_zero() {
            return Err(QTetError::AlphaFitFailure("alpha_1 = 0".into()));
        }
        let p = QParams {
            classical: classical.clone(),
            field: field.clone(),
            alpha0,
            alpha1,
        };
        for (name, list) in [("theta", theta), ("theta*", theta_star)] {
            for (i, t) in list.iter().enumerate() {
                let want = p.fitted(i);
                if *t != want {
                    return Err(QTetError::AlphaFitFailure(format!("{name}_{i} = {t}, fit gives {want}")));
                }
            }
        }
        Ok(p)
    }

    /// `alpha_0 + alpha_1 q^(D-2i)`.
    pub fn fitted(&self, i: usize) -> Scalar {
        let e = self.classical.d as i64 - 2 * i as i64;
        &self.alpha0 + &(&self.alpha1 * &self.field.qpow(e))
    }

    /// The same parameters with `q` replaced by `-q`.
    pub fn flipped(&self) -> Result<Self, QTetError> {
        let field = self.field.flipped();
        let d = self.classical.d;
        let theta: Vec<Scalar> = (0..=d).map(|i| self.to_field(&self.fitted(i), &field)).collect();
        QParams::fit(&self.classical, &field, &theta, &theta)
    }

    fn to_field(&self, s: &Scalar, other: &GroundField) -> Scalar {
        // theta_i is rational, so re-expressing it in another field is a copy
        other.scalar(s.a0().clone(), s.a1().clone())
    }

    /// `b>1` or `b<-1`.
    pub fn branch(&self) -> &'static str {
        if self.classical.b > 1 {
            "b>1"
        } else {
            "b<-1"
        }
    }
}

/// `q^(ci*i + cj*j + cd*D)` on cell `(i,j)` of one grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridOp {
    pub kind: KindKey,
    pub ci: i64,
    pub cj: i64,
    pub cd: i64,
}

/// Orderable stand-in for [`Kind`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KindKey {
    DD,
    UD,
    DU,
    UU,
}

impl KindKey {
    pub fn kind(self) -> Kind {
        match self {
            KindKey::DD => Kind::DD,
            KindKey::UD => Kind::UD,
            KindKey::DU => Kind::DU,
            KindKey::UU => Kind::UU,
        }
    }
}

impl GridOp {
    const fn new(kind: KindKey, ci: i64, cj: i64, cd: i64) -> Self {
        GridOp { kind, ci, cj, cd }
    }

    pub fn inverse(self) -> Self {
        GridOp::new(self.kind, -self.ci, -self.cj, -self.cd)
    }

    pub fn exponent(self, i: usize, j: usize, d: usize) -> i64 {
        self.ci * i as i64 + self.cj * j as i64 + self.cd * d as i64
    }
}

/// An operator on the standard module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Op {
    A,
    AStar,
    /// The adjacency matrix `A_1`.
    A1,
    /// The dual adjacency matrix `A*_1`.
    AStar1,
    Grid(GridOp),
}

pub const OP_B: GridOp = GridOp::new(KindKey::DU, 1, -1, 0);
pub const OP_BSTAR: GridOp = GridOp::new(KindKey::UD, -1, 1, 0);
pub const OP_K: GridOp = GridOp::new(KindKey::DD, 1, -1, 0);
pub const OP_KSTAR: GridOp = GridOp::new(KindKey::UU, 1, -1, 0);
pub const OP_PHI: GridOp = GridOp::new(KindKey::DD, 1, 1, -1);
pub const OP_PSI: GridOp = GridOp::new(KindKey::DU, 1, 1, -1);
/// `Phi` from the up-up grid.
pub const OP_PHI_UP: GridOp = GridOp::new(KindKey::UU, -1, -1, 1);
/// `Psi` from the up-down grid.
pub const OP_PSI_UP: GridOp = GridOp::new(KindKey::UD, -1, -1, 1);
/// The closed form of `Phi^-1`.
pub const OP_PHI_INV_FORMULA: GridOp = GridOp::new(KindKey::UU, 1, 1, -1);
/// The closed form of `Psi^-1`.
pub const OP_PSI_INV_FORMULA: GridOp = GridOp::new(KindKey::UD, 1, 1, -1);

/// The eight matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Matrix {
    A,
    AStar,
    B,
    BStar,
    K,
    KStar,
    Phi,
    Psi,
}

impl Matrix {
    pub const ALL: [Matrix; 8] = [
        Matrix::A,
        Matrix::AStar,
        Matrix::B,
        Matrix::BStar,
        Matrix::K,
        Matrix::KStar,
        Matrix::Phi,
        Matrix::Psi,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Matrix::A => "A",
            Matrix::AStar => "Astar",
            Matrix::B => "B",
            Matrix::BStar => "Bstar",
            Matrix::K => "K",
            Matrix::KStar => "Kstar",
            Matrix::Phi => "Phi",
            Matrix::Psi => "Psi",
        }
    }

    pub fn op(self) -> Op {
        match self {
            Matrix::A => Op::A,
            Matrix::AStar => Op::AStar,
            Matrix::B => Op::Grid(OP_B),
            Matrix::BStar => Op::Grid(OP_BSTAR),
            Matrix::K => Op::Grid(OP_K),
            Matrix::KStar => Op::Grid(OP_KSTAR),
            Matrix::Phi => Op::Grid(OP_PHI),
            Matrix::Psi => Op::Grid(OP_PSI),
        }
    }

    /// The grid and cell weights that define the matrix, for the six that
    /// have one.
    pub fn grid_op(self) -> Option<GridOp> {
        match self.op() {
            Op::Grid(g) => Some(g),
            _ => None,
        }
    }
}

/// The q-tetrahedron generators `x_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub i: usize,
    pub j: usize,
}

impl Gen {
    pub const ALL: [Gen; 8] = [
        Gen { i: 0, j: 1 },
        Gen { i: 1, j: 2 },
        Gen { i: 2, j: 3 },
        Gen { i: 3, j: 0 },
        Gen { i: 0, j: 2 },
        Gen { i: 2, j: 0 },
        Gen { i: 1, j: 3 },
        Gen { i: 3, j: 1 },
    ];

    /// `x_ij` for `j - i` in `{1, 2}` mod 4.
    pub fn new(i: usize, j: usize) -> Option<Gen> {
        let (i, j) = (i % 4, j % 4);
        matches!((j + 4 - i) % 4, 1 | 2).then_some(Gen { i, j })
    }

    pub fn label(self) -> String {
        format!("x{}{}", self.i, self.j)
    }

    /// The factors of the action, leftmost first.
    pub fn chain(self) -> Vec<Op> {
        use Op::*;
        let g = Op::Grid;
        match (self.i, self.j) {
            (0, 1) => vec![A, g(OP_PHI), g(OP_PSI.inverse())],
            (1, 2) => vec![g(OP_B), g(OP_PHI.inverse())],
            (2, 3) => vec![AStar, g(OP_PHI), g(OP_PSI)],
            (3, 0) => vec![g(OP_BSTAR), g(OP_PHI.inverse())],
            (0, 2) => vec![g(OP_K), g(OP_PSI.inverse())],
            (2, 0) => vec![g(OP_PSI), g(OP_K.inverse())],
            (1, 3) => vec![g(OP_KSTAR), g(OP_PSI)],
            (3, 1) => vec![g(OP_PSI.inverse()), g(OP_KSTAR.inverse())],
            _ => unreachable!("not a generator"),
        }
    }

    /// The generator equal to the transpose of this one.
    pub fn transpose_partner(self) -> Gen {
        let (i, j) = match (self.i, self.j) {
            (1, 2) => (3, 0),
            (3, 0) => (1, 2),
            (0, 2) => (3, 1),
            (3, 1) => (0, 2),
            (2, 0) => (1, 3),
            (1, 3) => (2, 0),
            other => other,
        };
        Gen { i, j }
    }
}

/// Graph data shared by every action: the split bases, adjacency lists,
/// and the distance partition from the base vertex.
pub struct Frame<'a> {
    pub split: &'a SplitSystem<Rational>,
    neighbors: Vec<Vec<usize>>,
    shells: Vec<usize>,
    theta_star: Vec<Scalar>,
    d: usize,
}

impl<'a> Frame<'a> {
    pub fn new(split: &'a SplitSystem<Rational>, dd: &DistanceData, dual: &DualData) -> Self {
        let n = dd.n();
        let neighbors = (0..n).map(|x| (0..n).filter(|&y| dd.dist(x, y) == 1).collect()).collect();
        Frame {
            split,
            neighbors,
            shells: dual.shells().to_vec(),
            theta_star: dual.theta_star().to_vec(),
            d: split.diameter(),
        }
    }

    pub fn n(&self) -> usize {
        self.shells.len()
    }

    fn exponents(&self, op: GridOp) -> Vec<i64> {
        let d = self.d;
        self.split.grid(op.kind.kind()).coordinate_weights(|i, j| op.exponent(i, j, d))
    }
}

/// A way of applying the operators to blocks of column vectors.
pub trait Action {
    type Block: Clone;

    fn params(&self) -> &QParams;
    fn tally(&self, tol: f64) -> Tally;
    fn apply(&self, op: Op, x: &Self::Block) -> Self::Block;
    fn lin(&self, terms: &[(Scalar, &Self::Block)]) -> Self::Block;
    /// `u^t v`.
    fn gram(&self, u: &Self::Block, v: &Self::Block) -> Self::Block;
    fn transpose(&self, x: &Self::Block) -> Self::Block;
    /// Entrywise complex conjugate.
    fn conj(&self, x: &Self::Block) -> Self::Block;
    /// Re-expresses a block over `q` as a block over the positive root, so
    /// blocks from actions with opposite `qsign` can be compared.
    fn canonical(&self, x: &Self::Block) -> Self::Block;
    fn record(&self, t: &mut Tally, lhs: &Self::Block, rhs: &Self::Block, witness: &dyn Fn() -> String);
    /// The basis of one grid, optionally with column `k` scaled by the
    /// weight of its cell under `op`.
    fn grid_basis(&self, kind: Kind, scaled_by: Option<GridOp>) -> Self::Block;
    fn columns(&self, x: &Self::Block, range: std::ops::Range<usize>) -> Self::Block;

    fn gen(&self, g: Gen, x: &Self::Block) -> Self::Block {
        self.chain(&g.chain(), x)
    }

    fn chain(&self, ops: &[Op], x: &Self::Block) -> Self::Block {
        let mut acc = x.clone();
        for op in ops.iter().rev() {
            acc = self.apply(*op, &acc);
        }
        acc
    }

    fn q(&self, e: i64) -> Scalar {
        self.params().field.qpow(e)
    }
}

/// `re + q * qp` with rational parts.
#[derive(Debug, Clone, PartialEq)]
pub struct QBlock {
    pub re: Mat<Rational>,
    pub qp: Mat<Rational>,
}

impl QBlock {
    pub fn rational(re: Mat<Rational>) -> Self {
        let qp = Mat::zeros(re.rows(), re.cols());
        QBlock { re, qp }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.qp.is_zero()
    }
}

fn scale_rows(m: &Mat<Rational>, w: &[Rational]) -> Mat<Rational> {
    let mut out = m.clone();
    for (r, s) in w.iter().enumerate() {
        if *s == 1 {
            continue;
        }
        for x in out.row_mut(r) {
            *x *= s;
        }
    }
    out
}

/// Exact action over the field of the parameters.
pub struct ExactAction<'a> {
    frame: &'a Frame<'a>,
    params: QParams,
    /// Per grid op: the coordinate weights split into rational and `q` parts.
    weights: BTreeMap<GridOp, (Vec<Rational>, Vec<Rational>)>,
    astar: (Vec<Rational>, Vec<Rational>),
    inv_alpha1: Scalar,
}

impl<'a> ExactAction<'a> {
    pub fn new(frame: &'a Frame<'a>, params: QParams) -> Result<Self, QTetError> {
        let d = frame.d as i64;
        let astar_w: Vec<Scalar> = frame.shells.iter().map(|&s| params.field.qpow(d - 2 * s as i64)).collect();
        let astar = split_parts(&astar_w);
        let inv_alpha1 = params.alpha1.recip()?;
        Ok(ExactAction {
            frame,
            params,
            weights: BTreeMap::new(),
            astar,
            inv_alpha1,
        })
        .map(|mut a| {
            for op in all_grid_ops() {
                let w: Vec<Scalar> = frame.exponents(op).into_iter().map(|e| a.params.field.qpow(e)).collect();
                a.weights.insert(op, split_parts(&w));
            }
            a
        })
    }

    fn b(&self) -> i64 {
        self.params.field.b()
    }

    fn scale_by_diag(&self, x: &QBlock, w: &(Vec<Rational>, Vec<Rational>)) -> QBlock {
        let b = Rational::from(self.b());
        let re0 = scale_rows(&x.re, &w.0);
        let mut re = re0;
        let mut qp = scale_rows(&x.qp, &w.0);
        if w.1.iter().any(|s| *s != 0) {
            let w1b: Vec<Rational> = w.1.iter().map(|s| Rational::from(s * &b)).collect();
            re = re.add(&scale_rows(&x.qp, &w1b));
            qp = qp.add(&scale_rows(&x.re, &w.1));
        }
        QBlock { re, qp }
    }

    fn adjacency(&self, x: &Mat<Rational>) -> Mat<Rational> {
        let k = x.cols();
        let mut out = Mat::zeros(x.rows(), k);
        for (v, nbrs) in self.frame.neighbors.iter().enumerate() {
            let row = out.row_mut(v);
            for &y in nbrs {
                for (o, s) in row.iter_mut().zip(x.row(y)) {
                    *o += s;
                }
            }
        }
        out
    }

    fn both(&self, x: &QBlock, f: impl Fn(&Mat<Rational>) -> Mat<Rational>) -> QBlock {
        let qp = if x.qp.is_zero() {
            Mat::zeros(x.qp.rows(), x.qp.cols())
        } else {
            f(&x.qp)
        };
        QBlock { re: f(&x.re), qp }
    }

    /// `v -> (A_1 v - alpha_0 v) / alpha_1`, or the dual version.
    fn affine(&self, a1x: QBlock, x: &QBlock) -> QBlock {
        let shifted = self.lin(&[(Scalar::one(), &a1x), (-&self.params.alpha0, x)]);
        self.lin(&[(self.inv_alpha1.clone(), &shifted)])
    }
}

fn split_parts(w: &[Scalar]) -> (Vec<Rational>, Vec<Rational>) {
    (w.iter().map(|s| s.a0().clone()).collect(), w.iter().map(|s| s.a1().clone()).collect())
}

fn all_grid_ops() -> Vec<GridOp> {
    let base = [OP_B, OP_BSTAR, OP_K, OP_KSTAR, OP_PHI, OP_PSI, OP_PHI_UP, OP_PSI_UP];
    let mut ops: Vec<GridOp> = base.iter().flat_map(|&g| [g, g.inverse()]).collect();
    ops.sort();
    ops.dedup();
    ops
}

impl Action for ExactAction<'_> {
    type Block = QBlock;

    fn params(&self) -> &QParams {
        &self.params
    }

    fn tally(&self, _tol: f64) -> Tally {
        Tally::exact()
    }

    fn apply(&self, op: Op, x: &QBlock) -> QBlock {
        match op {
            Op::A1 => self.both(x, |m| self.adjacency(m)),
            Op::AStar1 => {
                let w = split_parts(&self.frame.theta_star.iter().map(|t| t.clone()).collect::<Vec<_>>());
                let diag: Vec<Rational> = self.frame.shells.iter().map(|&s| w.0[s].clone()).collect();
                self.both(x, |m| scale_rows(m, &diag))
            }
            Op::A => {
                let a1x = self.apply(Op::A1, x);
                self.affine(a1x, x)
            }
            Op::AStar => self.scale_by_diag(x, &self.astar),
            Op::Grid(g) => {
                let grid = self.frame.split.grid(g.kind.kind()).direct_sum();
                let coords = self.both(x, |m| grid.inverse().matmul(m));
                let scaled = self.scale_by_diag(&coords, &self.weights[&g]);
                self.both(&scaled, |m| grid.change().matmul(m))
            }
        }
    }

    fn lin(&self, terms: &[(Scalar, &QBlock)]) -> QBlock {
        let (r, c) = (terms[0].1.re.rows(), terms[0].1.re.cols());
        let mut re = Mat::zeros(r, c);
        let mut qp = Mat::zeros(r, c);
        let b = self.b();
        for (s, x) in terms {
            let (s0, s1) = (s.a0(), s.a1());
            if *s0 != 0 {
                re.add_assign_scaled(&x.re, s0);
                qp.add_assign_scaled(&x.qp, s0);
            }
            if *s1 != 0 {
                re.add_assign_scaled(&x.qp, &Rational::from(s1 * b));
                qp.add_assign_scaled(&x.re, s1);
            }
        }
        QBlock { re, qp }
    }

    fn gram(&self, u: &QBlock, v: &QBlock) -> QBlock {
        let ut = self.transpose(u);
        let re = ut.re.matmul(&v.re);
        let qq = ut.qp.matmul(&v.qp);
        let mut re = re;
        re.add_assign_scaled(&qq, &Rational::from(self.b()));
        let qp = ut.re.matmul(&v.qp).add(&ut.qp.matmul(&v.re));
        QBlock { re, qp }
    }

    fn transpose(&self, x: &QBlock) -> QBlock {
        QBlock {
            re: x.re.transpose(),
            qp: x.qp.transpose(),
        }
    }

    fn conj(&self, x: &QBlock) -> QBlock {
        // conj(q) = -q exactly when b < 0
        if self.b() < 0 {
            QBlock {
                re: x.re.clone(),
                qp: x.qp.scale(&Rational::from(-1)),
            }
        } else {
            x.clone()
        }
    }

    fn canonical(&self, x: &QBlock) -> QBlock {
        if self.params.field.mode() == FieldMode::Quadratic && self.params.field.qsign() == QSign::Minus {
            QBlock {
                re: x.re.clone(),
                qp: x.qp.scale(&Rational::from(-1)),
            }
        } else {
            x.clone()
        }
    }

    fn record(&self, t: &mut Tally, lhs: &QBlock, rhs: &QBlock, witness: &dyn Fn() -> String) {
        t.record_diff(&lhs.re, &rhs.re, witness);
        t.record_diff(&lhs.qp, &rhs.qp, witness);
    }

    fn grid_basis(&self, kind: Kind, scaled_by: Option<GridOp>) -> QBlock {
        let c = self.frame.split.grid(kind).direct_sum().change();
        let base = QBlock::rational(c.clone());
        match scaled_by {
            None => base,
            Some(g) => {
                let w = &self.weights[&g];
                let t = self.transpose(&base);
                self.transpose(&self.scale_by_diag(&t, w))
            }
        }
    }

    fn columns(&self, x: &QBlock, range: std::ops::Range<usize>) -> QBlock {
        let cols: Vec<usize> = range.collect();
        QBlock {
            re: x.re.select_columns(&cols),
            qp: x.qp.select_columns(&cols),
        }
    }
}

/// Dense complex matrices converted from the exact split bases.
pub struct FloatBases {
    change: Vec<Mat<Complex64>>,
    inverse: Vec<Mat<Complex64>>,
}

impl FloatBases {
    pub fn new(split: &SplitSystem<Rational>) -> Self {
        let conv = |m: &Mat<Rational>| m.map(|r| Complex64::new(r.to_f64(), 0.0));
        let change = Kind::ALL.iter().map(|&k| conv(split.grid(k).direct_sum().change())).collect();
        let inverse = Kind::ALL.iter().map(|&k| conv(split.grid(k).direct_sum().inverse())).collect();
        FloatBases { change, inverse }
    }

    fn slot(kind: Kind) -> usize {
        Kind::ALL.iter().position(|&k| k == kind).expect("known kind")
    }
}

/// Floating-point action with every operator and generator stored densely.
pub struct FloatAction<'a> {
    frame: &'a Frame<'a>,
    bases: &'a FloatBases,
    params: QParams,
    dense: BTreeMap<Op, Mat<Complex64>>,
    gens: BTreeMap<Gen, Mat<Complex64>>,
    weights: BTreeMap<GridOp, Vec<Complex64>>,
}

impl<'a> FloatAction<'a> {
    pub fn new(frame: &'a Frame<'a>, bases: &'a FloatBases, params: QParams) -> Result<Self, QTetError> {
        let n = frame.n();
        let field = params.field.clone();
        let c = |s: &Scalar| field.to_complex(s);
        let d = frame.d as i64;
        let mut dense = BTreeMap::new();
        let mut weights = BTreeMap::new();
        let mut a1 = Mat::zeros(n, n);
        for (x, nbrs) in frame.neighbors.iter().enumerate() {
            for &y in nbrs {
                a1[(x, y)] = Complex64::new(1.0, 0.0);
            }
        }
        let alpha0 = c(&params.alpha0);
        let inv_alpha1 = c(&params.alpha1.recip()?);
        let a = Mat::from_fn(n, n, |x, y| {
            let shift = if x == y { alpha0 } else { Complex64::new(0.0, 0.0) };
            (a1[(x, y)] - shift) * inv_alpha1
        });
        let astar1: Vec<Complex64> = frame.shells.iter().map(|&s| c(&frame.theta_star[s])).collect();
        let astar: Vec<Complex64> = frame.shells.iter().map(|&s| c(&field.qpow(d - 2 * s as i64))).collect();
        dense.insert(Op::A1, a1);
        dense.insert(Op::A, a);
        dense.insert(Op::AStar1, Mat::diagonal(&astar1));
        dense.insert(Op::AStar, Mat::diagonal(&astar));
        for g in all_grid_ops() {
            let w: Vec<Complex64> = frame.exponents(g).into_iter().map(|e| c(&field.qpow(e))).collect();
            let slot = FloatBases::slot(g.kind.kind());
            let mut scaled = bases.inverse[slot].clone();
            for (r, s) in w.iter().enumerate() {
                for x in scaled.row_mut(r) {
                    *x *= s;
                }
            }
            dense.insert(Op::Grid(g), bases.change[slot].matmul(&scaled));
            weights.insert(g, w);
        }
        let mut act = FloatAction {
            frame,
            bases,
            params,
            dense,
            gens: BTreeMap::new(),
            weights,
        };
        for g in Gen::ALL {
            let chain = g.chain();
            let mut m = act.dense[chain.last().expect("nonempty chain")].clone();
            for op in chain.iter().rev().skip(1) {
                m = act.dense[op].matmul(&m);
            }
            act.gens.insert(g, m);
        }
        Ok(act)
    }

    /// Applies a generator factor by factor rather than through its stored
    /// product.
    pub fn gen_by_chain(&self, g: Gen, x: &Mat<Complex64>) -> Mat<Complex64> {
        self.chain(&g.chain(), x)
    }
}

fn is_identity(m: &Mat<Complex64>) -> bool {
    m.is_square()
        && (0..m.rows()).all(|r| {
            m.row(r)
                .iter()
                .enumerate()
                .all(|(c, v)| *v == if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
        })
}

impl Action for FloatAction<'_> {
    type Block = Mat<Complex64>;

    fn params(&self) -> &QParams {
        &self.params
    }

    fn tally(&self, tol: f64) -> Tally {
        Tally::float(tol)
    }

    fn apply(&self, op: Op, x: &Mat<Complex64>) -> Mat<Complex64> {
        let m = &self.dense[&op];
        if is_identity(x) {
            m.clone()
        } else {
            m.matmul(x)
        }
    }

    fn gen(&self, g: Gen, x: &Mat<Complex64>) -> Mat<Complex64> {
        let m = &self.gens[&g];
        if is_identity(x) {
            m.clone()
        } else {
            m.matmul(x)
        }
    }

    fn lin(&self, terms: &[(Scalar, &Mat<Complex64>)]) -> Mat<Complex64> {
        let (r, c) = (terms[0].1.rows(), terms[0].1.cols());
        let mut out = Mat::zeros(r, c);
        for (s, x) in terms {
            out.add_assign_scaled(x, &self.params.field.to_complex(s));
        }
        out
    }

    fn gram(&self, u: &Mat<Complex64>, v: &Mat<Complex64>) -> Mat<Complex64> {
        if is_identity(u) {
            v.clone()
        } else {
            u.transpose().matmul(v)
        }
    }

    fn transpose(&self, x: &Mat<Complex64>) -> Mat<Complex64> {
        x.transpose()
    }

    fn conj(&self, x: &Mat<Complex64>) -> Mat<Complex64> {
        x.conj()
    }

    fn canonical(&self, x: &Mat<Complex64>) -> Mat<Complex64> {
        x.clone()
    }

    fn record(&self, t: &mut Tally, lhs: &Mat<Complex64>, rhs: &Mat<Complex64>, witness: &dyn Fn() -> String) {
        t.record_diff(lhs, rhs, witness);
    }

    fn grid_basis(&self, kind: Kind, scaled_by: Option<GridOp>) -> Mat<Complex64> {
        let mut c = self.bases.change[FloatBases::slot(kind)].clone();
        if let Some(g) = scaled_by {
            let w = &self.weights[&g];
            for r in 0..c.rows() {
                for (x, s) in c.row_mut(r).iter_mut().zip(w) {
                    *x *= s;
                }
            }
        }
        c
    }

    fn columns(&self, x: &Mat<Complex64>, range: std::ops::Range<usize>) -> Mat<Complex64> {
        x.select_columns(&range.collect::<Vec<_>>())
    }
}

impl FloatAction<'_> {
    /// Checks that stored generator products agree with the factor chains.
    pub fn check_chains(&self, tol: f64, count: usize, seed: u64) -> Check {
        let n = self.frame.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = Mat::from_fn(n, count, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        let mut t = Tally::float(tol);
        for g in Gen::ALL {
            t.record_diff(&self.gens[&g].matmul(&v), &self.gen_by_chain(g, &v), || g.label());
        }
        t.finish("qtet.generators.chains", "stored x_ij equals its factor chain on random vectors")
            .with_branch(self.params.branch())
    }
}

/// Seeded rational probe vectors.
pub fn probe_block(n: usize, count: usize, seed: u64) -> QBlock {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let re = Mat::from_fn(n, count, |_, _| {
        let num: i64 = rng.gen_range(-9..=9);
        let den: i64 = rng.gen_range(1..=6);
        Rational::from((num, den))
    });
    QBlock::rational(re)
}

pub fn identity_block(n: usize) -> QBlock {
    QBlock::rational(Mat::identity(n))
}

/// Coordinate checks that need no vectors: the eigenvalue fit and
/// `A = sum q^(D-2i) E_i`, `A* = sum q^(D-2i) E*_i`.
pub fn spectral_checks(params: &QParams, scheme: &SchemeData, dual: &DualData) -> Vec<Check> {
    let d = scheme.diameter();
    let branch = params.branch();
    let mut t = Tally::exact();
    for i in 0..=d {
        if scheme.theta()[i] != params.fitted(i) {
            t.fail(format!("theta_{i}"));
        }
        if dual.theta_star()[i] != params.fitted(i) {
            t.fail(format!("theta*_{i}"));
        }
    }
    if params.alpha1.is_zero() {
        t.fail("alpha_1 = 0".into());
    }
    let mut checks = vec![t
        .finish("qtet.eigenvalue_fit", "theta_i = theta*_i = alpha_0 + alpha_1 q^(D-2i), alpha_1 != 0")
        .with_branch(branch)];

    let mut t = Tally::exact();
    let inv = params.alpha1.recip().expect("alpha_1 is nonzero");
    let mut a = vec![Scalar::zero(); d + 1];
    a[0] = &(-&params.alpha0) * &inv;
    a[1] = inv.clone();
    let mut sum = vec![Scalar::zero(); d + 1];
    for i in 0..=d {
        let w = params.field.qpow(d as i64 - 2 * i as i64);
        for (s, e) in sum.iter_mut().zip(scheme.idempotent_coords(i)) {
            *s = &*s + &(&w * e);
        }
    }
    if a != sum {
        t.fail("A differs from sum q^(D-2i) E_i".into());
    }
    for i in 0..=d {
        let lhs = &(&dual.theta_star()[i] - &params.alpha0) * &inv;
        if lhs != params.field.qpow(d as i64 - 2 * i as i64) {
            t.fail(format!("A* on E*_{i}V"));
        }
    }
    checks.push(
        t.finish("qtet.spectral", "A = sum q^(D-2i) E_i and A* = sum q^(D-2i) E*_i")
            .with_branch(branch),
    );
    checks
}

fn finish<X: Action>(act: &X, t: Tally, name: String, anchor: &str) -> Check {
    t.finish(name, anchor).with_branch(act.params().branch())
}

/// The defining table: each of the six matrices acts on every tilde cell of
/// its grid as a power of `q`.
pub fn table_checks<X: Action>(act: &X, frame: &Frame<'_>, tol: f64) -> Vec<Check> {
    let d = frame.d;
    let rows: [(&str, GridOp, Kind, GridOp); 8] = [
        ("B", OP_B, Kind::DU, OP_B),
        ("Bstar", OP_BSTAR, Kind::UD, OP_BSTAR),
        ("K", OP_K, Kind::DD, OP_K),
        ("Kstar", OP_KSTAR, Kind::UU, OP_KSTAR),
        ("Phi", OP_PHI, Kind::DD, OP_PHI),
        ("Psi", OP_PSI, Kind::DU, OP_PSI),
        ("Phi_from_up", OP_PHI_UP, Kind::DD, OP_PHI),
        ("Psi_from_up", OP_PSI_UP, Kind::DU, OP_PSI),
    ];
    let mut checks = Vec::new();
    for (label, op, kind, expect) in rows {
        let mut t = act.tally(tol);
        let basis = act.grid_basis(kind, None);
        let lhs = act.apply(Op::Grid(op), &basis);
        let rhs = act.grid_basis(kind, Some(expect));
        let sum = frame.split.grid(kind).direct_sum();
        for i in 0..=d {
            for j in 0..=d {
                let range = sum.cell_range(i * (d + 1) + j);
                if range.is_empty() {
                    continue;
                }
                let e = expect.exponent(i, j, d);
                act.record(
                    &mut t,
                    &act.columns(&lhs, range.clone()),
                    &act.columns(&rhs, range),
                    &|| format!("{label} - q^{e} I on {kind} cell ({i},{j})"),
                );
            }
        }
        let anchor = match label {
            "B" => "B - q^(i-j) I vanishes on Ṽ^{du}_{i,j}",
            "Bstar" => "B* - q^(j-i) I vanishes on Ṽ^{ud}_{i,j}",
            "K" => "K - q^(i-j) I vanishes on Ṽ^{dd}_{i,j}",
            "Kstar" => "K* - q^(i-j) I vanishes on Ṽ^{uu}_{i,j}",
            "Phi" => "Phi - q^(i+j-D) I vanishes on Ṽ^{dd}_{i,j}",
            "Psi" => "Psi - q^(i+j-D) I vanishes on Ṽ^{du}_{i,j}",
            "Phi_from_up" => "sum q^(D-i-j) E^{uu}_{i,j} - q^(i+j-D) I vanishes on Ṽ^{dd}_{i,j}",
            _ => "sum q^(D-i-j) E^{ud}_{i,j} - q^(i+j-D) I vanishes on Ṽ^{du}_{i,j}",
        };
        checks.push(finish(act, t, format!("qtet.table.{label}"), anchor));
    }
    checks
}

/// Transposes, inverse formulas, the alternative expressions for `Phi` and
/// `Psi`, and centrality, all on the block `v`.
pub fn transpose_checks<X: Action>(act: &X, v: &X::Block, tol: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    let g = Op::Grid;
    let pairs: [(&str, Op, Op, &str); 6] = [
        ("A", Op::A, Op::A, "A^t = A"),
        ("Astar", Op::AStar, Op::AStar, "A*^t = A*"),
        ("B", g(OP_B), g(OP_BSTAR), "B^t = B*"),
        ("K", g(OP_K), g(OP_KSTAR.inverse()), "K^t = (K*)^-1"),
        ("Phi", g(OP_PHI), g(OP_PHI), "Phi^t = Phi"),
        ("Psi", g(OP_PSI), g(OP_PSI), "Psi^t = Psi"),
    ];
    for (label, m, n, anchor) in pairs {
        let mut t = act.tally(tol);
        // u^t M v = (N u)^t v for all u, v in the block
        let lhs = act.gram(v, &act.apply(m, v));
        let rhs = act.gram(&act.apply(n, v), v);
        act.record(&mut t, &lhs, &rhs, &|| format!("{label} transpose"));
        checks.push(finish(act, t, format!("qtet.transpose.{label}"), anchor));
    }

    for (label, m, formula, anchor) in [
        ("Phi", OP_PHI, OP_PHI_INV_FORMULA, "Phi^-1 = sum q^(i+j-D) E^{uu}_{i,j}"),
        ("Psi", OP_PSI, OP_PSI_INV_FORMULA, "Psi^-1 = sum q^(i+j-D) E^{ud}_{i,j}"),
        ("K", OP_K, OP_K.inverse(), "K sum q^(j-i) E^{dd}_{i,j} = I"),
        ("Kstar", OP_KSTAR, OP_KSTAR.inverse(), "K* sum q^(j-i) E^{uu}_{i,j} = I"),
    ] {
        let mut t = act.tally(tol);
        act.record(&mut t, &act.apply(g(m), &act.apply(g(formula), v)), v, &|| format!("{label} * inverse"));
        act.record(&mut t, &act.apply(g(formula), &act.apply(g(m), v)), v, &|| format!("inverse * {label}"));
        checks.push(finish(act, t, format!("qtet.inverse.{label}"), anchor));
    }

    for (label, down, up, anchor) in [
        ("Phi", OP_PHI, OP_PHI_UP, "sum q^(i+j-D) E^{dd}_{i,j} = sum q^(D-i-j) E^{uu}_{i,j}"),
        ("Psi", OP_PSI, OP_PSI_UP, "sum q^(i+j-D) E^{du}_{i,j} = sum q^(D-i-j) E^{ud}_{i,j}"),
    ] {
        let mut t = act.tally(tol);
        act.record(&mut t, &act.apply(g(down), v), &act.apply(g(up), v), &|| label.to_string());
        checks.push(finish(act, t, format!("qtet.expressions.{label}"), anchor));
    }

    for (label, m) in [("Phi", OP_PHI), ("Psi", OP_PSI)] {
        let mut t = act.tally(tol);
        for (name, a) in [("A_1", Op::A1), ("A*_1", Op::AStar1)] {
            let lhs = act.apply(g(m), &act.apply(a, v));
            let rhs = act.apply(a, &act.apply(g(m), v));
            act.record(&mut t, &lhs, &rhs, &|| format!("{label} {name}"));
        }
        checks.push(finish(act, t, format!("qtet.central.{label}"), "commutes with A_1 and A*_1"));
    }
    let mut t = act.tally(tol);
    let lhs = act.apply(g(OP_PHI), &act.apply(g(OP_PSI), v));
    let rhs = act.apply(g(OP_PSI), &act.apply(g(OP_PHI), v));
    act.record(&mut t, &lhs, &rhs, &|| "Phi Psi".into());
    checks.push(finish(act, t, "qtet.commute.Phi_Psi".into(), "Phi Psi = Psi Phi"));
    checks
}

/// Realness for `b > 1`; `conj(S) = S'` and the parity of `A`, `A*` for
/// `b < -1`. `v` must be a real block.
pub fn conjugate_checks<X: Action>(act: &X, flipped: &X, v: &X::Block, tol: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    let real = act.params().classical.b > 1;
    for m in Matrix::ALL {
        let mut t = act.tally(tol);
        let sv = act.canonical(&act.apply(m.op(), v));
        if real {
            act.record(&mut t, &act.conj(&sv), &sv, &|| format!("{} not real", m.label()));
            checks.push(finish(act, t, format!("qtet.real.{}", m.label()), "conj(S) = S"));
        } else {
            let sv_flip = flipped.canonical(&flipped.apply(m.op(), v));
            act.record(&mut t, &act.conj(&sv), &sv_flip, &|| format!("conj({0}) != {0}'", m.label()));
            checks.push(finish(act, t, format!("qtet.conj.{}", m.label()), "conj(S) = S' where S' uses q' = -q"));
        }
    }
    let d = act.params().classical.d;
    let sign = if d % 2 == 0 { Scalar::one() } else { Scalar::from_i64(-1) };
    for (label, op) in [("A", Op::A), ("Astar", Op::AStar)] {
        let mut t = act.tally(tol);
        let lhs = act.canonical(&act.apply(op, v));
        let rhs = flipped.canonical(&flipped.apply(op, v));
        let rhs = act.lin(&[(sign.clone(), &rhs)]);
        act.record(&mut t, &lhs, &rhs, &|| format!("{label}' vs {label}"));
        let anchor = if d % 2 == 0 { "A' = A and A*' = A* (D even)" } else { "A' = -A and A*' = -A* (D odd)" };
        checks.push(finish(act, t, format!("qtet.parity.{label}"), anchor));
    }
    checks
}

/// Relations (i)-(iii) of the q-tetrahedron algebra, one check per instance.
pub fn relation_checks<X: Action>(act: &X, v: &X::Block, tol: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    let one = Scalar::one();
    let q = act.q(1);
    let qinv = act.q(-1);
    let field = &act.params().field;
    let q3 = field.q_int(3).expect("q is not a root of unity");
    let gen = |i: usize, j: usize| Gen::new(i, j).expect("valid generator");

    for i in 0..4 {
        let (x, y) = (gen(i, i + 2), gen(i + 2, i));
        let mut t = act.tally(tol);
        act.record(&mut t, &act.gen(x, &act.gen(y, v)), v, &|| format!("{}{}", x.label(), y.label()));
        checks.push(finish(act, t, format!("qtet.relation.inverse.{}_{}", x.label(), y.label()), "x_ij x_ji = 1 for j - i = 2"));
    }

    let q_minus_qinv = &q - &qinv;
    for (di, dj) in [(1, 1), (1, 2), (2, 1)] {
        for h in 0..4 {
            let (i, j) = (h + di, h + di + dj);
            let (x, y) = (gen(h, i), gen(i, j));
            let mut t = act.tally(tol);
            let xy = act.gen(x, &act.gen(y, v));
            let yx = act.gen(y, &act.gen(x, v));
            let lhs = act.lin(&[(q.clone(), &xy), (-&qinv, &yx)]);
            let rhs = act.lin(&[(q_minus_qinv.clone(), v)]);
            act.record(&mut t, &lhs, &rhs, &|| format!("{} {}", x.label(), y.label()));
            checks.push(finish(
                act,
                t,
                format!("qtet.relation.weyl.{}_{}", x.label(), y.label()),
                "(q x_hi x_ij - q^-1 x_ij x_hi)/(q - q^-1) = 1",
            ));
        }
    }

    for h in 0..4 {
        let (x, y) = (gen(h, h + 1), gen(h + 2, h + 3));
        let mut t = act.tally(tol);
        let xv = act.gen(x, v);
        let xxv = act.gen(x, &xv);
        let xxxv = act.gen(x, &xxv);
        let yv = act.gen(y, v);
        let t1 = act.gen(x, &act.gen(x, &act.gen(x, &yv)));
        let t2 = act.gen(x, &act.gen(x, &act.gen(y, &xv)));
        let t3 = act.gen(x, &act.gen(y, &xxv));
        let t4 = act.gen(y, &xxxv);
        let lhs = act.lin(&[(one.clone(), &t1), (-&q3, &t2), (q3.clone(), &t3), (-&one, &t4)]);
        let zero = act.lin(&[(Scalar::zero(), v)]);
        act.record(&mut t, &lhs, &zero, &|| format!("{} {}", x.label(), y.label()));
        checks.push(finish(
            act,
            t,
            format!("qtet.relation.serre.{}_{}", x.label(), y.label()),
            "x^3 y - [3]_q x^2 y x + [3]_q x y x^2 - y x^3 = 0",
        ));
    }
    checks
}

/// The transpose table of the generators and their conjugates.
pub fn generator_symmetry_checks<X: Action>(act: &X, flipped: &X, v: &X::Block, tol: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    for g in Gen::ALL {
        let p = g.transpose_partner();
        let mut t = act.tally(tol);
        let lhs = act.gram(v, &act.gen(g, v));
        let rhs = act.gram(&act.gen(p, v), v);
        act.record(&mut t, &lhs, &rhs, &|| format!("{}^t != {}", g.label(), p.label()));
        checks.push(finish(
            act,
            t,
            format!("qtet.generator_transpose.{}", g.label()),
            &format!("{}^t = {}", g.label(), p.label()),
        ));
    }
    let real = act.params().classical.b > 1;
    for g in Gen::ALL {
        let mut t = act.tally(tol);
        let gv = act.canonical(&act.gen(g, v));
        let want = if real { gv.clone() } else { flipped.canonical(&flipped.gen(g, v)) };
        act.record(&mut t, &act.conj(&gv), &want, &|| g.label());
        let anchor = if real { "conj(x_ij) = x_ij" } else { "conj(x_ij) = x'_ij" };
        checks.push(finish(act, t, format!("qtet.generator_conj.{}", g.label()), anchor));
    }
    checks
}

/// Every identity that acts on a block of vectors, in a fixed order.
pub fn block_checks<X: Action>(act: &X, flipped: &X, frame: &Frame<'_>, v: &X::Block, tol: f64) -> Vec<Check> {
    let mut checks = table_checks(act, frame, tol);
    checks.extend(transpose_checks(act, v, tol));
    checks.extend(conjugate_checks(act, flipped, v, tol));
    checks.extend(relation_checks(act, v, tol));
    checks.extend(generator_symmetry_checks(act, flipped, v, tol));
    checks
}

/// How exact checks choose their vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    /// Every standard basis vector.
    Full,
    /// This many seeded rational vectors.
    Count(usize),
}

#[derive(Debug, Clone)]
pub struct QTetOptions {
    pub probe: Probe,
    pub seed: u64,
    pub float_sweep: bool,
    pub tol: f64,
}

impl Default for QTetOptions {
    fn default() -> Self {
        QTetOptions {
            probe: Probe::Count(32),
            seed: 42,
            float_sweep: true,
            tol: 1e-8,
        }
    }
}

/// Runs the whole suite for one choice of `q`; the flipped system shares the
/// split decompositions.
pub fn run_suite(
    frame: &Frame<'_>,
    scheme: &SchemeData,
    dual: &DualData,
    params: &QParams,
    opts: &QTetOptions,
) -> Result<Vec<Check>, QTetError> {
    let mut checks = spectral_checks(params, scheme, dual);
    let flipped_params = params.flipped()?;
    let exact = ExactAction::new(frame, params.clone())?;
    let exact_flipped = ExactAction::new(frame, flipped_params.clone())?;
    let v = match opts.probe {
        Probe::Full => identity_block(frame.n()),
        Probe::Count(k) => probe_block(frame.n(), k, opts.seed),
    };
    checks.extend(block_checks(&exact, &exact_flipped, frame, &v, 0.0));
    if opts.float_sweep {
        let bases = FloatBases::new(frame.split);
        let float = FloatAction::new(frame, &bases, params.clone())?;
        let float_flipped = FloatAction::new(frame, &bases, flipped_params)?;
        let id = Mat::identity(frame.n());
        checks.push(float.check_chains(opts.tol, 10, opts.seed));
        checks.extend(block_checks(&float, &float_flipped, frame, &id, opts.tol));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_family, GraphSpec};

    fn inter(spec: &str) -> IntersectionData {
        let g = build_family(&spec.parse::<GraphSpec>().unwrap()).unwrap();
        IntersectionData::new(&DistanceData::new(&g).unwrap()).unwrap()
    }

    #[test]
    fn cube_is_rejected() {
        let det = detect_classical(&inter("hamming:3,2"));
        let bs: Vec<i64> = det.candidates.iter().map(|c| c.b).collect();
        assert_eq!(bs, vec![1, -2]);
        assert!(det.candidates.iter().all(|c| c.rejection.is_some()));
        assert!(det.candidates[1].rejection.as_ref().unwrap().contains("c_3 would be 12"));
        assert!(matches!(det.result, Err(QTetError::BEqualsOne(_))));
    }

    #[test]
    fn johnson_fails_alpha() {
        // J(7,3) has classical parameters with alpha = 1, b = 1
        let det = detect_classical(&inter("johnson:7,3"));
        assert!(det.result.is_err());
    }

    #[test]
    fn q_integer_three() {
        let f = GroundField::new(2, QSign::Plus).unwrap();
        assert_eq!(f.q_int(3).unwrap(), Scalar::from_rational(Rational::from((7, 2))));
    }

    #[test]
    fn generator_table() {
        assert_eq!(Gen::new(0, 2).unwrap().transpose_partner(), Gen::new(3, 1).unwrap());
        assert_eq!(Gen::new(0, 1).unwrap().transpose_partner(), Gen::new(0, 1).unwrap());
        assert!(Gen::new(0, 3).is_none());
        for g in Gen::ALL {
            assert_eq!(g.transpose_partner().transpose_partner(), g);
        }
    }

    #[test]
    fn synthetic_fit() {
        let f = GroundField::new(2, QSign::Plus).unwrap();
        let c = Classical {
            d: 3,
            b: 2,
            alpha: 1,
            beta: Rational::from(7),
        };
        let theta: Vec<Scalar> = (0..=3).map(|i| f.qpow(3 - 2 * i)).collect();
        let p = QParams::fit(&c, &f, &theta, &theta).unwrap();
        assert!(p.alpha0.is_zero());
        assert_eq!(p.alpha1, Scalar::one());
    }
}
