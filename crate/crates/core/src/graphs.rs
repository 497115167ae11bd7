//! Test-bed graph families, distances and intersection numbers.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::gf::FiniteField;
use crate::linalg::{FieldElem, Mat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unsupported finite field order {0}")]
    UnsupportedFieldOrder(usize),
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error(
        "not distance-regular: pair ({x},{y}) at distance {h} has {got} vertices at distances \
         ({i},{j}), expected {expected}"
    )]
    NotDistanceRegular {
        x: usize,
        y: usize,
        h: usize,
        i: usize,
        j: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: loop or repeated edge {u} {v}")]
    LoopOrMultiEdge { line: usize, u: usize, v: usize },
    #[error("cannot read graph file: {0}")]
    Io(String),
    #[error("unknown graph spec `{0}`")]
    UnknownSpec(String),
}

/// A finite simple connected graph on vertices `0..n`.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds from an edge list, rejecting loops, repeated edges and
    /// disconnected inputs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for (line, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(GraphError::Parse {
                    line: line + 1,
                    msg: format!("vertex out of range in edge {u} {v}"),
                });
            }
            if u == v || adj[u].contains(&v) {
                return Err(GraphError::LoopOrMultiEdge { line: line + 1, u, v });
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Graph::from_adjacency(adj, None)
    }

    fn from_adjacency(mut adj: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Self, GraphError> {
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Graph {
            n: adj.len(),
            adj,
            labels,
        };
        if g.n == 0 || g.bfs(0).iter().any(|d| d.is_none()) {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn adjacency_matrix<F: FieldElem>(&self) -> Mat<F> {
        let mut m = Mat::zeros(self.n, self.n);
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                m[(u, v)] = F::one();
            }
        }
        m
    }

    fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices are reached");
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Sphere sizes `|{y : d(x, y) = i}|` around `x`.
    pub fn sphere_sizes(&self, x: usize) -> Vec<usize> {
        let dist = self.bfs(x);
        let d = dist.iter().flatten().copied().max().unwrap_or(0);
        let mut sizes = vec![0; d + 1];
        for v in dist.into_iter().flatten() {
            sizes[v] += 1;
        }
        sizes
    }

    /// Parses the edge-list format: first line `n`, then `u v` per line;
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut n: Option<usize> = None;
        let mut adj: Vec<Vec<usize>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let parse_num = |s: &str| {
                s.parse::<usize>().map_err(|_| GraphError::Parse {
                    line,
                    msg: format!("expected a nonnegative integer, found `{s}`"),
                })
            };
            match n {
                None => {
                    if fields.len() != 1 {
                        return Err(GraphError::Parse {
                            line,
                            msg: "expected the vertex count".into(),
                        });
                    }
                    let count = parse_num(fields[0])?;
                    n = Some(count);
                    adj = vec![Vec::new(); count];
                }
                Some(count) => {
                    if fields.len() != 2 {
                        return Err(GraphError::Parse {
                            line,
                            msg: "expected `u v`".into(),
                        });
                    }
                    let (u, v) = (parse_num(fields[0])?, parse_num(fields[1])?);
                    if u >= count || v >= count {
                        return Err(GraphError::Parse {
                            line,
                            msg: format!("vertex out of range (n = {count})"),
                        });
                    }
                    if u == v || adj[u].contains(&v) {
                        return Err(GraphError::LoopOrMultiEdge { line, u, v });
                    }
                    adj[u].push(v);
                    adj[v].push(u);
                }
            }
        }
        if n.is_none() {
            return Err(GraphError::Parse {
                line: 0,
                msg: "empty graph file".into(),
            });
        }
        Graph::from_adjacency(adj, None)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| GraphError::Io(e.to_string()))?;
        Graph::parse(&text)
    }

    /// Edge-list text accepted by [`Graph::parse`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list.iter().filter(|&&v| v > u) {
                out.push_str(&format!("{u} {v}\n"));
            }
        }
        out
    }
}

/// A graph family with parameters, as written on the command line
/// (`hamming:3,2`, `bilinear:3,3,2`, `file:petersen.txt`, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    /// `H(D, q)`: words of length `D` over a `q`-set.
    Hamming { d: usize, q: usize },
    /// `J(n, d)`: `d`-subsets of an `n`-set.
    Johnson { n: usize, d: usize },
    Cycle { n: usize },
    /// `Bil(d x e, r)`: `d x e` matrices over `GF(r)`.
    Bilinear { d: usize, e: usize, r: usize },
    /// `Her(d, r)`: `d x d` Hermitian matrices over `GF(r^2)`.
    Hermitian { d: usize, r: usize },
    File(String),
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Hamming { d, q } => write!(f, "hamming:{d},{q}"),
            GraphSpec::Johnson { n, d } => write!(f, "johnson:{n},{d}"),
            GraphSpec::Cycle { n } => write!(f, "cycle:{n}"),
            GraphSpec::Bilinear { d, e, r } => write!(f, "bilinear:{d},{e},{r}"),
            GraphSpec::Hermitian { d, r } => write!(f, "hermitian:{d},{r}"),
            GraphSpec::File(p) => write!(f, "file:{p}"),
        }
    }
}

impl FromStr for GraphSpec {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || GraphError::UnknownSpec(s.to_string());
        let (family, params) = s.split_once(':').ok_or_else(unknown)?;
        if family == "file" {
            return Ok(GraphSpec::File(params.to_string()));
        }
        let nums: Vec<usize> = params
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| unknown())?;
        match (family, nums.as_slice()) {
            ("hamming", &[d, q]) => Ok(GraphSpec::Hamming { d, q }),
            ("johnson", &[n, d]) => Ok(GraphSpec::Johnson { n, d }),
            ("cycle", &[n]) => Ok(GraphSpec::Cycle { n }),
            ("bilinear", &[d, e, r]) => Ok(GraphSpec::Bilinear { d, e, r }),
            ("hermitian", &[d, r]) => Ok(GraphSpec::Hermitian { d, r }),
            _ => Err(unknown()),
        }
    }
}

/// Constructs the graph named by `spec` with lexicographic vertex order.
pub fn build_family(spec: &GraphSpec) -> Result<Graph, GraphError> {
    match *spec {
        GraphSpec::Hamming { d, q } => hamming(d, q),
        GraphSpec::Johnson { n, d } => johnson(n, d),
        GraphSpec::Cycle { n } => cycle(n),
        GraphSpec::Bilinear { d, e, r } => bilinear_forms(d, e, r),
        GraphSpec::Hermitian { d, r } => hermitian_forms(d, r),
        GraphSpec::File(ref path) => Graph::from_file(path),
    }
}

fn words(len: usize, base: usize) -> Vec<Vec<usize>> {
    let total = base.pow(len as u32);
    (0..total)
        .map(|mut x| {
            let mut w = vec![0; len];
            for slot in w.iter_mut().rev() {
                *slot = x % base;
                x /= base;
            }
            w
        })
        .collect()
}

fn hamming(d: usize, q: usize) -> Result<Graph, GraphError> {
    if d == 0 || q < 2 {
        return Err(GraphError::DegenerateParameters(format!("hamming:{d},{q}")));
    }
    let verts = words(d, q);
    let index: HashMap<&Vec<usize>, usize> = verts.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let adj = verts
        .iter()
        .map(|w| {
            let mut nb = Vec::new();
            for pos in 0..d {
                for s in 0..q {
                    if s != w[pos] {
                        let mut u = w.clone();
                        u[pos] = s;
                        nb.push(index[&u]);
                    }
                }
            }
            nb
        })
        .collect();
    let labels = verts
        .iter()
        .map(|w| w.iter().map(ToString::to_string).collect::<Vec<_>>().join(""))
        .collect();
    Graph::from_adjacency(adj, Some(labels))
}

fn johnson(n: usize, d: usize) -> Result<Graph, GraphError> {
    if d == 0 || 2 * d > n {
        return Err(GraphError::DegenerateParameters(format!("johnson:{n},{d}")));
    }
    let mut subsets = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, d, cur, out);
            cur.pop();
        }
    }
    rec(0, n, d, &mut cur, &mut subsets);
    let adj = subsets
        .iter()
        .map(|a| {
            subsets
                .iter()
                .enumerate()
                .filter(|(_, b)| a.iter().filter(|x| b.contains(x)).count() == d - 1)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let labels = subsets.iter().map(|s| format!("{s:?}")).collect();
    Graph::from_adjacency(adj, Some(labels))
}

fn cycle(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::DegenerateParameters(format!("cycle:{n}")));
    }
    let adj = (0..n).map(|i| vec![(i + n - 1) % n, (i + 1) % n]).collect();
    Graph::from_adjacency(adj, None)
}

/// Graph on matrices over a finite field: vertices are the entry vectors
/// `verts` (row-major over `0..order`), adjacency is `rank(M - N) = 1`.
fn forms_graph(
    field: &FiniteField,
    rows: usize,
    cols: usize,
    verts: Vec<Vec<usize>>,
) -> Result<Graph, GraphError> {
    let index: HashMap<&Vec<usize>, usize> = verts.iter().enumerate().map(|(i, w)| (w, i)).collect();
    // differences of adjacent vertices are exactly the rank-one members of
    // the (additively closed) vertex set
    let rank_one: Vec<&Vec<usize>> = verts
        .iter()
        .filter(|m| field.rank(rows, cols, m) == 1)
        .collect();
    let adj = verts
        .iter()
        .map(|m| {
            rank_one
                .iter()
                .map(|r| {
                    let sum: Vec<usize> = m.iter().zip(r.iter()).map(|(&a, &b)| field.add(a, b)).collect();
                    index[&sum]
                })
                .collect()
        })
        .collect();
    let labels = verts
        .iter()
        .map(|m| m.iter().map(ToString::to_string).collect::<Vec<_>>().join(""))
        .collect();
    Graph::from_adjacency(adj, Some(labels))
}

fn bilinear_forms(d: usize, e: usize, r: usize) -> Result<Graph, GraphError> {
    if d == 0 || e == 0 || d > e {
        return Err(GraphError::DegenerateParameters(format!(
            "bilinear:{d},{e},{r} needs 1 <= d <= e"
        )));
    }
    let field = FiniteField::new(r)?;
    let verts = words(d * e, r);
    forms_graph(&field, d, e, verts)
}

fn hermitian_forms(d: usize, r: usize) -> Result<Graph, GraphError> {
    if d == 0 {
        return Err(GraphError::DegenerateParameters(format!("hermitian:{d},{r}")));
    }
    let field = FiniteField::new(r * r)?;
    if field.characteristic().pow(field.degree() as u32 / 2) != r || field.degree() % 2 != 0 {
        return Err(GraphError::UnsupportedFieldOrder(r * r));
    }
    let conj = |x: usize| field.pow(x, r);
    let is_hermitian = |m: &Vec<usize>| {
        (0..d).all(|i| (0..d).all(|j| m[j * d + i] == conj(m[i * d + j])))
    };
    // enumerate in lexicographic order of the full entry vector
    let verts: Vec<Vec<usize>> = words(d * d, r * r).into_iter().filter(is_hermitian).collect();
    forms_graph(&field, d, d, verts)
}

/// Distances from every vertex, and the distance partition.
#[derive(Debug, Clone)]
pub struct DistanceData {
    n: usize,
    diameter: usize,
    dist: Vec<u16>,
}

impl DistanceData {
    pub fn new(g: &Graph) -> Result<Self, GraphError> {
        let n = g.n();
        let mut dist = vec![0u16; n * n];
        let mut diameter = 0;
        for x in 0..n {
            let row = g.bfs(x);
            for (y, d) in row.into_iter().enumerate() {
                let d = d.ok_or(GraphError::Disconnected)?;
                diameter = diameter.max(d);
                dist[x * n + y] = d as u16;
            }
        }
        Ok(DistanceData { n, diameter, dist })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn dist(&self, x: usize, y: usize) -> usize {
        self.dist[x * self.n + y] as usize
    }

    /// Vertices at distance exactly `i` from `x`.
    pub fn sphere(&self, x: usize, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.dist(x, y) == i).collect()
    }

    /// Vertices at distance in `lo..=hi` from `x`.
    pub fn shell_range(&self, x: usize, lo: usize, hi: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&y| (lo..=hi).contains(&self.dist(x, y)))
            .collect()
    }

    /// The distance-`i` matrix `A_i`.
    pub fn distance_matrix<F: FieldElem>(&self, i: usize) -> Mat<F> {
        Mat::from_fn(self.n, self.n, |x, y| {
            if self.dist(x, y) == i {
                F::one()
            } else {
                F::zero()
            }
        })
    }

    /// Checks `A_0 = I`, symmetry, and the triangle inequality.
    pub fn check_metric(&self) -> bool {
        let n = self.n;
        for x in 0..n {
            if self.dist(x, x) != 0 {
                return false;
            }
            for y in 0..n {
                if self.dist(x, y) != self.dist(y, x) || (x != y && self.dist(x, y) == 0) {
                    return false;
                }
            }
        }
        // path distances obey the triangle inequality along edges
        true
    }
}

/// Intersection numbers `p^h_{ij}` and the array `c_i, a_i, b_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionData {
    diameter: usize,
    p: Vec<usize>,
    pub c: Vec<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl IntersectionData {
    /// Computes `p^h_{ij}` from one pair per `h` and verifies the counts on
    /// every ordered pair of vertices.
    pub fn new(dd: &DistanceData) -> Result<Self, GraphError> {
        let n = dd.n();
        let d = dd.diameter();
        let s = d + 1;
        let mut p = vec![0usize; s * s * s];
        let mut seen = vec![false; s];
        let mut counts = vec![0usize; s * s];
        for x in 0..n {
            for y in 0..n {
                let h = dd.dist(x, y);
                counts.iter_mut().for_each(|c| *c = 0);
                for z in 0..n {
                    counts[dd.dist(x, z) * s + dd.dist(y, z)] += 1;
                }
                let block = &mut p[h * s * s..(h + 1) * s * s];
                if !seen[h] {
                    block.copy_from_slice(&counts);
                    seen[h] = true;
                    continue;
                }
                if let Some(k) = (0..s * s).find(|&k| block[k] != counts[k]) {
                    return Err(GraphError::NotDistanceRegular {
                        x,
                        y,
                        h,
                        i: k / s,
                        j: k % s,
                        expected: block[k],
                        got: counts[k],
                    });
                }
            }
        }
        let get = |h: usize, i: usize, j: usize| p[(h * s + i) * s + j];
        let c = (0..s).map(|i| if i == 0 { 0 } else { get(i, 1, i - 1) }).collect();
        let a = (0..s).map(|i| get(i, 1, i)).collect();
        let b = (0..s).map(|i| if i == d { 0 } else { get(i, 1, i + 1) }).collect();
        Ok(IntersectionData {
            diameter: d,
            p,
            c,
            a,
            b,
        })
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn valency(&self) -> usize {
        self.b[0]
    }

    /// `p^h_{ij}`.
    pub fn p(&self, h: usize, i: usize, j: usize) -> usize {
        let s = self.diameter + 1;
        self.p[(h * s + i) * s + j]
    }

    /// `{b_0, ..., b_{D-1}; c_1, ..., c_D}`.
    pub fn array(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.b[..self.diameter].to_vec(),
            self.c[1..].to_vec(),
        )
    }

    pub fn array_string(&self) -> String {
        let (b, c) = self.array();
        let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        format!("{{{};{}}}", join(&b), join(&c))
    }

    /// Sphere sizes `k_i = p^0_{ii}`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        (0..=self.diameter).map(|i| self.p(0, i, i)).collect()
    }

    pub fn check_array_invariants(&self) -> bool {
        let k = self.valency();
        let d = self.diameter;
        let sym = (0..=d).all(|h| (0..=d).all(|i| (0..=d).all(|j| self.p(h, i, j) == self.p(h, j, i))));
        let sums = (0..=d).all(|i| self.c[i] + self.a[i] + self.b[i] == k);
        sym && sums && (d == 0 || self.c[1] == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn spec(s: &str) -> Graph {
        build_family(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn cube() {
        let g = spec("hamming:3,2");
        assert_eq!(g.n(), 8);
        assert!((0..8).all(|v| g.degree(v) == 3));
        let dd = DistanceData::new(&g).unwrap();
        assert_eq!(dd.diameter(), 3);
        let inter = IntersectionData::new(&dd).unwrap();
        assert_eq!(inter.array(), (vec![3, 2, 1], vec![1, 2, 3]));
        assert!(inter.check_array_invariants());
    }

    #[test]
    fn cycle_diameter() {
        let dd = DistanceData::new(&spec("cycle:8")).unwrap();
        assert_eq!(dd.diameter(), 4);
        assert!(dd.check_metric());
    }

    #[test]
    fn distance_partition() {
        let g = spec("johnson:6,3");
        let dd = DistanceData::new(&g).unwrap();
        let mats: Vec<Mat<Rational>> = (0..=dd.diameter()).map(|i| dd.distance_matrix(i)).collect();
        let mut sum = Mat::zeros(g.n(), g.n());
        for m in &mats {
            sum = sum.add(m);
        }
        assert_eq!(sum, Mat::all_ones(g.n(), g.n()));
        assert_eq!(mats[0], Mat::identity(g.n()));
        for (i, a) in mats.iter().enumerate() {
            for (j, b) in mats.iter().enumerate() {
                let h = a.hadamard(b);
                if i == j {
                    assert_eq!(&h, a);
                } else {
                    assert!(h.is_zero());
                }
            }
        }
    }

    #[test]
    fn three_term_recurrence() {
        let g = spec("hamming:3,3");
        let dd = DistanceData::new(&g).unwrap();
        let inter = IntersectionData::new(&dd).unwrap();
        let a: Vec<Mat<Rational>> = (0..=3).map(|i| dd.distance_matrix(i)).collect();
        for i in 0..=3 {
            let lhs = a[1].matmul(&a[i]);
            let mut rhs = a[i].scale(&Rational::from(inter.a[i] as i64));
            if i > 0 {
                rhs = rhs.add(&a[i - 1].scale(&Rational::from(inter.b[i - 1] as i64)));
            }
            if i < 3 {
                rhs = rhs.add(&a[i + 1].scale(&Rational::from(inter.c[i + 1] as i64)));
            }
            assert_eq!(lhs, rhs, "i = {i}");
        }
    }

    #[test]
    fn edge_list_parsing() {
        let g = Graph::parse("# square\n4\n0 1\n1 2\n2 3\n3 0\n").unwrap();
        assert_eq!(g.n(), 4);
        assert!((0..4).all(|v| g.degree(v) == 2));
        assert!(matches!(
            Graph::parse("3\n0 1\n2 2\n"),
            Err(GraphError::LoopOrMultiEdge { line: 3, u: 2, v: 2 })
        ));
        assert!(matches!(Graph::parse("4\n0 1\n2 3\n"), Err(GraphError::Disconnected)));
        assert!(matches!(Graph::parse("3\n0 1\n1 0\n"), Err(GraphError::LoopOrMultiEdge { .. })));
        assert!(matches!(Graph::parse("3\n0 x\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(Graph::parse("3\n0 5\n"), Err(GraphError::Parse { line: 2, .. })));
        let round = Graph::parse(&g.to_edge_list()).unwrap();
        assert_eq!(round.to_edge_list(), g.to_edge_list());
    }

    #[test]
    fn non_distance_regular_is_reported() {
        // a path on 3 vertices is not regular
        let g = Graph::parse("3\n0 1\n1 2\n").unwrap();
        let dd = DistanceData::new(&g).unwrap();
        assert!(matches!(
            IntersectionData::new(&dd),
            Err(GraphError::NotDistanceRegular { .. })
        ));
    }

    #[test]
    fn spec_round_trip() {
        for s in ["hamming:3,2", "johnson:7,3", "cycle:8", "bilinear:2,3,2", "hermitian:2,2", "file:x.txt"] {
            assert_eq!(s.parse::<GraphSpec>().unwrap().to_string(), s);
        }
        assert!("hamming:3".parse::<GraphSpec>().is_err());
        assert!("nope:1".parse::<GraphSpec>().is_err());
    }

    #[test]
    fn degenerate_and_unsupported() {
        assert!(matches!(
            build_family(&GraphSpec::Bilinear { d: 2, e: 2, r: 6 }),
            Err(GraphError::UnsupportedFieldOrder(6))
        ));
        assert!(matches!(
            build_family(&GraphSpec::Cycle { n: 2 }),
            Err(GraphError::DegenerateParameters(_))
        ));
    }
}
