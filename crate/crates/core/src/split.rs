//! The four split decompositions of the standard module, their projectors,
//! and the displacement projectors built from them.
//!
//! For `mu, nu` in `{down, up}` the cell `V^{mu nu}_{i,j}` is the intersection
//! of a run of `i + 1` dual eigenspaces with a run of `j + 1` eigenspaces: runs
//! start at index 0 for `down` and at index `D` for `up`. Dual eigenspaces are
//! coordinate subspaces, so each cell is the kernel of the complementary
//! eigenspace projector restricted to a set of coordinates.

use std::fmt;

use serde::Serialize;

use crate::field::GroundField;
use crate::graphs::DistanceData;
use crate::linalg::{FieldElem, LinalgError, Mat};
use crate::report::{Check, Tally};
use crate::scheme::{DualData, SchemeData, DENSE_LIMIT};
use crate::subspace::{DirectSum, Subspace};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SplitError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("idempotent entries are not representable in the chosen backend")]
    NotRepresentable,
    #[error("cell index ({0},{1}) out of range")]
    IndexOutOfRange(i64, i64),
    #[error("the split decomposition needs a Q-polynomial ordering")]
    NotQPolynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Dir {
    Down,
    Up,
}

/// A choice of `(mu, nu)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Kind {
    pub mu: Dir,
    pub nu: Dir,
}

impl Kind {
    pub const DD: Kind = Kind { mu: Dir::Down, nu: Dir::Down };
    pub const UD: Kind = Kind { mu: Dir::Up, nu: Dir::Down };
    pub const DU: Kind = Kind { mu: Dir::Down, nu: Dir::Up };
    pub const UU: Kind = Kind { mu: Dir::Up, nu: Dir::Up };
    pub const ALL: [Kind; 4] = [Kind::DD, Kind::UD, Kind::DU, Kind::UU];

    /// `dd`, `ud`, `du` or `uu`.
    pub fn label(self) -> &'static str {
        match (self.mu, self.nu) {
            (Dir::Down, Dir::Down) => "dd",
            (Dir::Up, Dir::Down) => "ud",
            (Dir::Down, Dir::Up) => "du",
            (Dir::Up, Dir::Up) => "uu",
        }
    }

    fn slot(self) -> usize {
        match (self.mu, self.nu) {
            (Dir::Down, Dir::Down) => 0,
            (Dir::Up, Dir::Down) => 1,
            (Dir::Down, Dir::Up) => 2,
            (Dir::Up, Dir::Up) => 3,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Shells `E*_lo .. E*_hi` covered by the `mu`-run of length `i + 1`.
fn shell_run(mu: Dir, i: usize, d: usize) -> (usize, usize) {
    match mu {
        Dir::Down => (0, i),
        Dir::Up => (d - i, d),
    }
}

/// One `(mu, nu)` grid: the cells, their tilde refinements, and the change
/// of basis onto the tilde cells.
#[derive(Debug, Clone)]
pub struct Grid<F> {
    kind: Kind,
    d: usize,
    cells: Vec<Subspace<F>>,
    tilde: Vec<Subspace<F>>,
    sum: DirectSum<F>,
}

impl<F: FieldElem> Grid<F> {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.d + 1) + j
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// `V^{mu nu}_{i,j}`; an index of `-1` gives the zero subspace.
    pub fn cell(&self, i: i64, j: i64) -> Result<Subspace<F>, SplitError> {
        let d = self.d as i64;
        if i < -1 || j < -1 || i > d || j > d {
            return Err(SplitError::IndexOutOfRange(i, j));
        }
        if i < 0 || j < 0 {
            return Ok(Subspace::zero(self.sum.ambient()));
        }
        Ok(self.cells[self.idx(i as usize, j as usize)].clone())
    }

    /// `Ṽ^{mu nu}_{i,j}`.
    pub fn tilde(&self, i: usize, j: usize) -> &Subspace<F> {
        &self.tilde[self.idx(i, j)]
    }

    pub fn dims(&self) -> Vec<Vec<usize>> {
        (0..=self.d)
            .map(|i| (0..=self.d).map(|j| self.tilde(i, j).dim()).collect())
            .collect()
    }

    pub fn direct_sum(&self) -> &DirectSum<F> {
        &self.sum
    }

    /// `E^{mu nu}_{i,j}`.
    pub fn projector(&self, i: usize, j: usize) -> Mat<F> {
        self.sum.projector(self.idx(i, j))
    }

    /// Sum of the projectors of all cells with `i + j = s`.
    pub fn antidiagonal_projector(&self, s: i64) -> Mat<F> {
        let cells: Vec<usize> = self.antidiagonal(s).into_iter().map(|(i, j)| self.idx(i, j)).collect();
        self.sum.projector_onto(&cells)
    }

    fn antidiagonal(&self, s: i64) -> Vec<(usize, usize)> {
        let d = self.d as i64;
        (0..=d)
            .filter_map(|i| {
                let j = s - i;
                (0..=d).contains(&j).then_some((i as usize, j as usize))
            })
            .collect()
    }

    /// `sum_{i,j} w(i,j) E^{mu nu}_{i,j}`.
    pub fn weighted_sum(&self, w: impl Fn(usize, usize) -> F) -> Mat<F> {
        let weights: Vec<F> = (0..=self.d)
            .flat_map(|i| (0..=self.d).map(move |j| (i, j)))
            .map(|(i, j)| w(i, j))
            .collect();
        self.sum.weighted_sum(&weights)
    }

    /// Cell weights in concatenated-basis order, for operators of the form
    /// `C diag(w) C^-1`.
    pub fn coordinate_weights<W: Clone>(&self, w: impl Fn(usize, usize) -> W) -> Vec<W> {
        let mut out = Vec::with_capacity(self.sum.ambient());
        for i in 0..=self.d {
            for j in 0..=self.d {
                let wij = w(i, j);
                for _ in self.sum.cell_range(self.idx(i, j)) {
                    out.push(wij.clone());
                }
            }
        }
        out
    }
}

/// All four split decompositions at one base vertex.
#[derive(Debug, Clone)]
pub struct SplitSystem<F> {
    n: usize,
    d: usize,
    field: GroundField,
    shells: Vec<usize>,
    shell_sizes: Vec<usize>,
    mult: Vec<usize>,
    grids: Vec<Grid<F>>,
    /// `E_0 V + ... + E_j V` and `E_{D-j} V + ... + E_D V`, for the corner checks.
    eigen_runs: [Vec<Subspace<F>>; 2],
}

impl<F: FieldElem> SplitSystem<F> {
    pub fn build(scheme: &SchemeData, dd: &DistanceData, dual: &DualData) -> Result<Self, SplitError> {
        if !scheme.is_q_polynomial() {
            return Err(SplitError::NotQPolynomial);
        }
        let n = scheme.n();
        let d = scheme.diameter();
        // complement of each eigenspace run: its kernel is the run itself
        let mut complements: [Vec<Mat<F>>; 2] = [Vec::new(), Vec::new()];
        let mut eigen_runs: [Vec<Subspace<F>>; 2] = [Vec::new(), Vec::new()];
        for (slot, nu) in [Dir::Down, Dir::Up].into_iter().enumerate() {
            for j in 0..=d {
                let (clo, chi, lo, hi) = match nu {
                    Dir::Down => (j + 1, d, 0, j),
                    Dir::Up => (0, (d - j).wrapping_sub(1), d - j, d),
                };
                let comp = if j == d {
                    Mat::zeros(n, n)
                } else {
                    scheme
                        .materialize::<F>(dd, &scheme.idempotent_range(clo, chi))
                        .ok_or(SplitError::NotRepresentable)?
                };
                complements[slot].push(comp);
                let run = scheme
                    .materialize::<F>(dd, &scheme.idempotent_range(lo, hi))
                    .ok_or(SplitError::NotRepresentable)?;
                eigen_runs[slot].push(Subspace::span(&run));
            }
        }
        let mut grids = Vec::with_capacity(4);
        for kind in Kind::ALL {
            let nu_slot = if kind.nu == Dir::Down { 0 } else { 1 };
            let mut cells = Vec::with_capacity((d + 1) * (d + 1));
            for i in 0..=d {
                let (lo, hi) = shell_run(kind.mu, i, d);
                let coords = dual.shell_range(lo, hi);
                for j in 0..=d {
                    cells.push(restricted_kernel(&complements[nu_slot][j], &coords, n));
                }
            }
            let at = |i: i64, j: i64| -> Subspace<F> {
                if i < 0 || j < 0 {
                    Subspace::zero(n)
                } else {
                    cells[i as usize * (d + 1) + j as usize].clone()
                }
            };
            let mut tilde = Vec::with_capacity(cells.len());
            for i in 0..=d as i64 {
                for j in 0..=d as i64 {
                    let lower = at(i - 1, j).sum(&at(i, j - 1))?;
                    tilde.push(Subspace::orth_complement_within(&lower, &at(i, j))?);
                }
            }
            let refs: Vec<&Subspace<F>> = tilde.iter().collect();
            let sum = DirectSum::new(&refs)?;
            grids.push(Grid {
                kind,
                d,
                cells,
                tilde,
                sum,
            });
        }
        Ok(SplitSystem {
            n,
            d,
            field: scheme.field().clone(),
            shells: dual.shells().to_vec(),
            shell_sizes: dual.shell_sizes(),
            mult: scheme.multiplicities().to_vec(),
            grids,
            eigen_runs,
        })
    }

    /// The tilde-cell change of basis of each grid, in `Kind::ALL` order.
    pub fn direct_sums(&self) -> Vec<&DirectSum<F>> {
        self.grids.iter().map(|g| &g.sum).collect()
    }

    /// Rebuilds a system from the four changes of basis returned by
    /// [`SplitSystem::direct_sums`], using `V_{i,j} = sum_{r<=i, s<=j} Ṽ_{r,s}`.
    pub fn from_direct_sums(
        scheme: &SchemeData,
        dual: &DualData,
        sums: Vec<DirectSum<F>>,
    ) -> Result<Self, SplitError> {
        let n = scheme.n();
        let d = scheme.diameter();
        let cells_per_grid = (d + 1) * (d + 1);
        if sums.len() != 4 || sums.iter().any(|s| s.ambient() != n || s.cell_count() != cells_per_grid) {
            return Err(LinalgError::ShapeMismatch("split system parts".into()).into());
        }
        let mut grids = Vec::with_capacity(4);
        for (kind, sum) in Kind::ALL.into_iter().zip(sums) {
            let block = |i: usize, j: usize| sum.cell_range(i * (d + 1) + j);
            let tilde: Vec<Subspace<F>> = (0..cells_per_grid)
                .map(|c| Subspace::span(&sum.change().select_columns(&sum.cell_range(c).collect::<Vec<_>>())))
                .collect();
            let mut cells = Vec::with_capacity(cells_per_grid);
            for i in 0..=d {
                for j in 0..=d {
                    let cols: Vec<usize> = (0..=i).flat_map(|r| (0..=j).flat_map(move |s| block(r, s))).collect();
                    cells.push(Subspace::span(&sum.change().select_columns(&cols)));
                }
            }
            grids.push(Grid { kind, d, cells, tilde, sum });
        }
        let run = |g: &Grid<F>| (0..=d).map(|j| g.cells[d * (d + 1) + j].clone()).collect::<Vec<_>>();
        let eigen_runs = [run(&grids[Kind::DD.slot()]), run(&grids[Kind::DU.slot()])];
        Ok(SplitSystem {
            n,
            d,
            field: scheme.field().clone(),
            shells: dual.shells().to_vec(),
            shell_sizes: dual.shell_sizes(),
            mult: scheme.multiplicities().to_vec(),
            grids,
            eigen_runs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diameter(&self) -> usize {
        self.d
    }

    pub fn field(&self) -> &GroundField {
        &self.field
    }

    pub fn grid(&self, kind: Kind) -> &Grid<F> {
        &self.grids[kind.slot()]
    }

    pub fn shells(&self) -> &[usize] {
        &self.shells
    }

    /// `phi_eta` from the down-down grid (`i + j = D + eta`).
    pub fn phi(&self, eta: usize) -> Mat<F> {
        self.grid(Kind::DD).antidiagonal_projector((self.d + eta) as i64)
    }

    /// `phi_eta` from the up-up grid (`i + j = D - eta`).
    pub fn phi_from_up(&self, eta: usize) -> Mat<F> {
        self.grid(Kind::UU).antidiagonal_projector(self.d as i64 - eta as i64)
    }

    /// `psi_zeta` from the down-up grid (`i + j = D + zeta`).
    pub fn psi(&self, zeta: i64) -> Mat<F> {
        self.grid(Kind::DU).antidiagonal_projector(self.d as i64 + zeta)
    }

    /// `psi_zeta` from the up-down grid (`i + j = D - zeta`).
    pub fn psi_from_up(&self, zeta: i64) -> Mat<F> {
        self.grid(Kind::UD).antidiagonal_projector(self.d as i64 - zeta)
    }

    /// Tilde-cell dimensions of all four grids, keyed by label.
    pub fn dims_table(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for kind in Kind::ALL {
            map.insert(kind.label().into(), serde_json::json!(self.grid(kind).dims()));
        }
        serde_json::Value::Object(map)
    }

    /// Runs the split-decomposition suite. Dense projector products are
    /// formed only when `dense`; otherwise the projector algebra is certified
    /// through `C^-1 C = I = C C^-1`.
    pub fn verify(&self, tol: f64, dense: bool) -> Vec<Check> {
        let d = self.d;
        let n = self.n;
        let id: Mat<F> = Mat::identity(n);
        let mut checks = Vec::new();

        for kind in Kind::ALL {
            let g = self.grid(kind);
            let mut t = Tally::for_elem::<F>(tol);
            let c = g.sum.change();
            let ci = g.sum.inverse();
            t.record_diff(&ci.matmul(c), &id, || "C^-1 C".into());
            t.record_diff(&c.matmul(ci), &id, || "C C^-1".into());
            if dense {
                let projs: Vec<Mat<F>> = (0..=d)
                    .flat_map(|i| (0..=d).map(move |j| (i, j)))
                    .map(|(i, j)| g.projector(i, j))
                    .collect();
                let mut sum = Mat::zeros(n, n);
                for (a, pa) in projs.iter().enumerate() {
                    sum = sum.add(pa);
                    for (b, pb) in projs.iter().enumerate() {
                        let want = if a == b { pa.clone() } else { Mat::zeros(n, n) };
                        t.record_diff(&pa.matmul(pb), &want, || {
                            format!("E_({},{}) E_({},{})", a / (d + 1), a % (d + 1), b / (d + 1), b % (d + 1))
                        });
                    }
                }
                t.record_diff(&sum, &id, || "sum of projectors".into());
            }
            checks.push(t.finish(
                format!("split.{kind}.partition"),
                "sum E^{mu nu}_{i,j} = I and E^{mu nu}_{i,j} E^{mu nu}_{r,s} = delta_ir delta_js E^{mu nu}_{i,j}",
            ));
        }

        let mut t = Tally::for_elem::<F>(tol);
        for kind in Kind::ALL {
            let g = self.grid(kind);
            for i in 0..=d {
                for j in 0..=d {
                    let p = g.projector(i, j);
                    t.record_diff(&p.conj(), &p, || format!("{kind} ({i},{j})"));
                }
            }
        }
        checks.push(t.finish("split.real", "conj(E^{mu nu}_{i,j}) = E^{mu nu}_{i,j}"));

        let mut t = Tally::for_elem::<F>(tol);
        for (kind, vanish) in [(Kind::DD, true), (Kind::UU, false)] {
            let g = self.grid(kind);
            for i in 0..=d {
                for j in 0..=d {
                    let should_vanish = if vanish { i + j < d } else { i + j > d };
                    if !should_vanish {
                        continue;
                    }
                    if g.tilde(i, j).dim() != 0 {
                        t.fail(format!("dim {kind} ({i},{j}) = {}", g.tilde(i, j).dim()));
                    }
                    if dense {
                        t.record_zero(&g.projector(i, j), 1.0, || format!("E^{kind}_({i},{j})"));
                    }
                }
            }
        }
        checks.push(t.finish("split.vanishing", "E^{dd}_{i,j} = 0 if i+j < D, E^{uu}_{i,j} = 0 if i+j > D"));

        for (a, b, label) in [(Kind::DD, Kind::UU, "dd_uu"), (Kind::DU, Kind::UD, "du_ud")] {
            let mut t = Tally::for_elem::<F>(tol);
            let (ga, gb) = (self.grid(a), self.grid(b));
            for i in 0..=d {
                for j in 0..=d {
                    t.record_diff(&ga.projector(i, j).transpose(), &gb.projector(d - i, d - j), || {
                        format!("({i},{j})")
                    });
                }
            }
            checks.push(t.finish(
                format!("split.transpose.{label}"),
                format!("(E^{{{a}}}_{{i,j}})^t = E^{{{b}}}_{{D-i,D-j}}"),
            ));
        }

        for (a, b, label) in [(Kind::DD, Kind::UU, "dd_uu"), (Kind::DU, Kind::UD, "du_ud")] {
            let mut t = Tally::for_elem::<F>(tol);
            let (ga, gb) = (self.grid(a), self.grid(b));
            let gram = ga.sum.change().conj_transpose().matmul(gb.sum.change());
            for i in 0..=d {
                for j in 0..=d {
                    for r in 0..=d {
                        for s in 0..=d {
                            if i + r == d && j + s == d {
                                continue;
                            }
                            let rows: Vec<usize> = ga.sum.cell_range(ga.idx(i, j)).collect();
                            let cols: Vec<usize> = gb.sum.cell_range(gb.idx(r, s)).collect();
                            if rows.is_empty() || cols.is_empty() {
                                continue;
                            }
                            let block = gram.select_rows(&rows).select_columns(&cols);
                            t.record_zero(&block, 1.0, || format!("<({i},{j}),({r},{s})>"));
                        }
                    }
                }
            }
            checks.push(t.finish(
                format!("split.orthogonality.{label}"),
                format!("<Ṽ^{{{a}}}_{{i,j}}, Ṽ^{{{b}}}_{{r,s}}> = 0 unless i+r = D and j+s = D"),
            ));
        }

        let mut t = Tally::exact();
        let dims: Vec<Vec<Vec<usize>>> = Kind::ALL.iter().map(|&k| self.grid(k).dims()).collect();
        let total = |k: usize| dims[k].iter().flatten().sum::<usize>();
        for (k, kind) in Kind::ALL.iter().enumerate() {
            if total(k) != n {
                t.fail(format!("{kind} dims sum to {}", total(k)));
            }
        }
        let (dd_, ud_, du_, uu_) = (&dims[0], &dims[1], &dims[2], &dims[3]);
        for i in 0..=d {
            let rows = [
                (0..=d).map(|j| dd_[i][j]).sum::<usize>(),
                (0..=d).map(|j| ud_[d - i][j]).sum(),
                (0..=d).map(|j| du_[i][j]).sum(),
                (0..=d).map(|j| uu_[d - i][j]).sum(),
            ];
            if rows.iter().any(|&r| r != self.shell_sizes[i]) {
                t.fail(format!("dim E*_{i}V = {} but row sums {rows:?}", self.shell_sizes[i]));
            }
        }
        for j in 0..=d {
            let cols = [
                (0..=d).map(|i| dd_[i][j]).sum::<usize>(),
                (0..=d).map(|i| du_[i][d - j]).sum(),
                (0..=d).map(|i| ud_[i][j]).sum(),
                (0..=d).map(|i| uu_[i][d - j]).sum(),
            ];
            if cols.iter().any(|&c| c != self.mult[j]) {
                t.fail(format!("dim E_{j}V = {} but column sums {cols:?}", self.mult[j]));
            }
        }
        checks.push(t.finish("split.dimensions", "dim E*_iV and dim E_jV equal the row and column sums of tilde dimensions"));

        let mut t = Tally::exact();
        for kind in Kind::ALL {
            let g = self.grid(kind);
            for (idx, cell) in g.tilde.iter().enumerate() {
                let b = cell.basis();
                let conj = b.conj();
                if conj != *b && !cell.contains(&Subspace::span(&conj)) {
                    t.fail(format!("{kind} cell ({},{})", idx / (d + 1), idx % (d + 1)));
                }
            }
        }
        checks.push(t.finish("split.conjugate_stable", "v in Ṽ^{mu nu}_{i,j} iff conj(v) in Ṽ^{mu nu}_{i,j}"));

        let mut t_real = Tally::for_elem::<F>(tol);
        let mut t_cross = Tally::for_elem::<F>(tol);
        let mut t_part = Tally::for_elem::<F>(tol);
        let phis: Vec<Mat<F>> = (0..=d).map(|eta| self.phi(eta)).collect();
        let psis: Vec<Mat<F>> = (-(d as i64)..=d as i64).map(|z| self.psi(z)).collect();
        for (eta, p) in phis.iter().enumerate() {
            t_cross.record_diff(p, &self.phi_from_up(eta), || format!("phi_{eta}"));
            t_real.record_diff(p, &p.conj(), || format!("phi_{eta} real"));
            t_real.record_diff(p, &p.transpose(), || format!("phi_{eta} symmetric"));
        }
        for (k, p) in psis.iter().enumerate() {
            let zeta = k as i64 - d as i64;
            t_cross.record_diff(p, &self.psi_from_up(zeta), || format!("psi_{zeta}"));
            t_real.record_diff(p, &p.conj(), || format!("psi_{zeta} real"));
            t_real.record_diff(p, &p.transpose(), || format!("psi_{zeta} symmetric"));
        }
        for (family, ps) in [("phi", &phis), ("psi", &psis)] {
            let mut sum = Mat::zeros(n, n);
            for p in ps.iter() {
                sum = sum.add(p);
            }
            t_part.record_diff(&sum, &id, || format!("sum {family}"));
            if dense {
                for (a, pa) in ps.iter().enumerate() {
                    for (b, pb) in ps.iter().enumerate() {
                        let want = if a == b { pa.clone() } else { Mat::zeros(n, n) };
                        t_part.record_diff(&pa.matmul(pb), &want, || format!("{family} {a} {b}"));
                    }
                }
            }
        }
        checks.push(t_cross.finish(
            "split.displacement.two_expressions",
            "sum_{i+j=D+eta} E^{dd}_{i,j} = sum_{i+j=D-eta} E^{uu}_{i,j}, sum_{i+j=D+zeta} E^{du}_{i,j} = sum_{i+j=D-zeta} E^{ud}_{i,j}",
        ));
        checks.push(t_real.finish("split.displacement.real_symmetric", "conj(phi_eta) = phi_eta = phi_eta^t, same for psi_zeta"));
        checks.push(t_part.finish("split.displacement.partition", "sum phi_eta = I, phi_eta phi_xi = delta phi_eta, same for psi_zeta"));

        checks.push(self.verify_cells());
        checks
    }

    /// Grid containments and the corner identities.
    fn verify_cells(&self) -> Check {
        let d = self.d;
        let mut t = Tally::exact();
        for kind in Kind::ALL {
            let g = self.grid(kind);
            for i in 0..=d as i64 {
                for j in 0..=d as i64 {
                    let here = g.cell(i, j).expect("in range");
                    for (a, b) in [(i - 1, j), (i, j - 1)] {
                        if !here.contains(&g.cell(a, b).expect("in range")) {
                            t.fail(format!("{kind}: ({a},{b}) not inside ({i},{j})"));
                        }
                    }
                }
            }
            let nu_slot = if kind.nu == Dir::Down { 0 } else { 1 };
            for k in 0..=d {
                let (lo, hi) = shell_run(kind.mu, k, d);
                let coords: Vec<usize> = (0..self.n).filter(|&y| (lo..=hi).contains(&self.shells[y])).collect();
                if g.cell(k as i64, d as i64).expect("in range") != Subspace::coordinate(self.n, &coords) {
                    t.fail(format!("{kind}: corner ({k},D) is not the dual eigenspace run"));
                }
                if g.cell(d as i64, k as i64).expect("in range") != self.eigen_runs[nu_slot][k] {
                    t.fail(format!("{kind}: corner (D,{k}) is not the eigenspace run"));
                }
            }
        }
        t.finish("split.cells", "V_{i-1,j} + V_{i,j-1} inside V_{i,j}; V_{i,D} and V_{D,j} are the dual and primal runs")
    }

    /// Compares projector components of `vectors` with the components found
    /// by solving `C x = v` directly.
    pub fn component_oracle(&self, vectors: &[Vec<F>], tol: f64) -> Check {
        let d = self.d;
        let mut t = Tally::for_elem::<F>(tol);
        let rhs = Mat::from_columns(self.n, vectors);
        for kind in Kind::ALL {
            let g = self.grid(kind);
            let c = g.sum.change();
            let solved = match c.solve(&rhs) {
                Ok(s) => s,
                Err(e) => {
                    t.fail(format!("{kind}: {e}"));
                    continue;
                }
            };
            for i in 0..=d {
                for j in 0..=d {
                    let p = g.projector(i, j);
                    let range: Vec<usize> = g.sum.cell_range(g.idx(i, j)).collect();
                    let direct = c.select_columns(&range).matmul(&solved.select_rows(&range));
                    t.record_diff(&p.matmul(&rhs), &direct, || format!("{kind} ({i},{j})"));
                }
            }
        }
        t.finish("split.component_oracle", "E^{mu nu}_{i,j} v equals the (i,j) part of the solution of C x = v")
    }
}

/// `{v : supp(v) in coords, M v = 0}`.
fn restricted_kernel<F: FieldElem>(m: &Mat<F>, coords: &[usize], n: usize) -> Subspace<F> {
    if coords.is_empty() {
        return Subspace::zero(n);
    }
    let k = m.select_columns(coords).kernel();
    let mut emb = Mat::zeros(n, k.cols());
    for (r, &c) in coords.iter().enumerate() {
        for col in 0..k.cols() {
            emb[(c, col)] = k[(r, col)].clone();
        }
    }
    Subspace::span(&emb)
}

/// Whether dense projector products are affordable at this size.
pub fn dense_default(n: usize) -> bool {
    n <= DENSE_LIMIT
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::QSign;
    use crate::graphs::{build_family, GraphSpec, IntersectionData};
    use crate::scheme::{natural_field_b, OrderingChoice};
    use rug::Rational;

    fn system(spec: &str) -> SplitSystem<Rational> {
        let g = build_family(&spec.parse::<GraphSpec>().unwrap()).unwrap();
        let dd = DistanceData::new(&g).unwrap();
        let inter = IntersectionData::new(&dd).unwrap();
        let field = GroundField::new(natural_field_b(&inter).unwrap_or(1), QSign::Plus).unwrap();
        let s = SchemeData::new(&inter, g.n(), &field, &OrderingChoice::Auto).unwrap();
        let dual = s.dual(&dd, 0).unwrap();
        SplitSystem::build(&s, &dd, &dual).unwrap()
    }

    #[test]
    fn cube_cells() {
        let sys = system("hamming:3,2");
        let dd = sys.grid(Kind::DD);
        for j in 0..3 {
            assert_eq!(dd.cell(0, j).unwrap().dim(), 0);
        }
        assert_eq!(dd.cell(0, 3).unwrap().dim(), 1);
        assert_eq!(dd.cell(2, -1).unwrap().dim(), 0);
        assert!(dd.cell(4, 0).is_err());
        for i in 0..=3 {
            for j in 0..=3 {
                if i + j != 3 {
                    assert_eq!(dd.tilde(i, j).dim(), 0, "({i},{j})");
                }
            }
        }
        for c in sys.verify(0.0, true) {
            assert!(c.passed(), "{c:?}");
        }
        assert_eq!(sys.phi(0), Mat::identity(8));
    }

    #[test]
    fn rebuild_from_direct_sums() {
        let g = build_family(&"hamming:3,3".parse::<GraphSpec>().unwrap()).unwrap();
        let dd = DistanceData::new(&g).unwrap();
        let inter = IntersectionData::new(&dd).unwrap();
        let field = GroundField::new(1, QSign::Plus).unwrap();
        let s = SchemeData::new(&inter, g.n(), &field, &OrderingChoice::Auto).unwrap();
        let dual = s.dual(&dd, 0).unwrap();
        let sys: SplitSystem<Rational> = SplitSystem::build(&s, &dd, &dual).unwrap();
        let sums = sys.direct_sums().into_iter().cloned().collect();
        let back = SplitSystem::from_direct_sums(&s, &dual, sums).unwrap();
        for kind in Kind::ALL {
            let (a, b) = (sys.grid(kind), back.grid(kind));
            assert_eq!(a.cells, b.cells);
            assert_eq!(a.tilde, b.tilde);
        }
        assert_eq!(sys.eigen_runs, back.eigen_runs);
    }
}
