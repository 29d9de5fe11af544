//! Finite windows of stable translation quivers `Z[T]` and of tubes
//! `Z[A_inf]/<tau^r>`, together with the vertex-function analysis used on them.
//!
//! A window only certifies statements on its interior: vertices whose
//! predecessors and translate all lie inside the window.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Valuation = (u32, u32);

/// Finite quiver without loops or multiple arrows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: usize,
    pub arrows: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(vertices: usize, arrows: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(s, t) in &arrows {
            if s >= vertices || t >= vertices {
                return Err(Error::Invalid(format!("arrow ({s},{t}) leaves the vertex set")));
            }
            if s == t {
                return Err(Error::Invalid(format!("loop at vertex {s}")));
            }
            if !seen.insert((s, t)) {
                return Err(Error::Invalid(format!("duplicate arrow ({s},{t})")));
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    pub fn chain(len: usize) -> Self {
        let arrows = (1..len).map(|i| (i - 1, i)).collect();
        Quiver { vertices: len, arrows }
    }
}

/// Section of a tree class used to build `Z[T]`.
///
/// `frontier` marks nodes whose neighbourhood in the full (possibly infinite)
/// tree is cut off; translates of these are never interior. `ql` labels the
/// nodes of an `A_inf` section with quasi-lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub quiver: Quiver,
    pub frontier: BTreeSet<usize>,
    pub ql: Option<Vec<usize>>,
    pub valuation: BTreeMap<(usize, usize), Valuation>,
}

impl Tree {
    pub fn new(quiver: Quiver) -> Self {
        Tree {
            quiver,
            frontier: BTreeSet::new(),
            ql: None,
            valuation: BTreeMap::new(),
        }
    }

    /// The first `len` nodes of `A_inf`, node `i` at quasi-length `i + 1`.
    pub fn a_inf(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Invalid("empty A_inf section".into()));
        }
        let mut tree = Tree::new(Quiver::chain(len));
        tree.frontier.insert(len - 1);
        tree.ql = Some((1..=len).collect());
        Ok(tree)
    }

    /// A segment of `A_inf_inf`, cut off at both ends.
    pub fn a_inf_inf(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Invalid("empty A_inf_inf section".into()));
        }
        let mut tree = Tree::new(Quiver::chain(len));
        tree.frontier.insert(0);
        tree.frontier.insert(len - 1);
        Ok(tree)
    }

    pub fn with_valuation(mut self, arrow: (usize, usize), v: Valuation) -> Result<Self> {
        if !self.quiver.arrows.contains(&arrow) {
            return Err(Error::Invalid(format!("no arrow {arrow:?} in the tree")));
        }
        if v.0 == 0 || v.1 == 0 {
            return Err(Error::Invalid("valuations are pairs of positive integers".into()));
        }
        self.valuation.insert(arrow, v);
        Ok(self)
    }

    fn nu(&self, arrow: (usize, usize)) -> Valuation {
        self.valuation.get(&arrow).copied().unwrap_or((1, 1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WindowKind {
    Zt { tree: Tree, n_min: i64, n_max: i64 },
    Tube { rank: usize, max_ql: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Vertex {
    /// `(n, t)` in `Z[T]`.
    Zt { n: i64, t: usize },
    /// `(k, q)` in a tube: position `k` modulo the rank, quasi-length `q`.
    Tube { k: usize, q: usize },
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Zt { n, t } => write!(f, "({n},{t})"),
            Vertex::Tube { k, q } => write!(f, "({k},{q})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrow {
    pub from: usize,
    pub to: usize,
    pub valuation: Valuation,
}

#[derive(Debug, Clone)]
pub struct QuiverWindow {
    kind: WindowKind,
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    arrows: Vec<Arrow>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    tau: Vec<Option<usize>>,
    interior: Vec<bool>,
    ql: Vec<Option<usize>>,
}

impl QuiverWindow {
    pub fn build(kind: WindowKind) -> Result<Self> {
        match kind {
            WindowKind::Zt { tree, n_min, n_max } => Self::zt(tree, n_min, n_max),
            WindowKind::Tube { rank, max_ql } => Self::tube(rank, max_ql),
        }
    }

    /// `Z[T]` restricted to translation indices `n_min..=n_max`.
    pub fn zt(tree: Tree, n_min: i64, n_max: i64) -> Result<Self> {
        if n_min > n_max || tree.quiver.vertices == 0 {
            return Err(Error::Invalid("empty window range".into()));
        }
        if let Some(ql) = &tree.ql {
            if ql.len() != tree.quiver.vertices {
                return Err(Error::Invalid("quasi-length labels do not cover the tree".into()));
            }
        }
        let nodes = tree.quiver.vertices;
        let mut vertices = Vec::new();
        for n in n_min..=n_max {
            for t in 0..nodes {
                vertices.push(Vertex::Zt { n, t });
            }
        }
        let mut arrows = Vec::new();
        for n in n_min..=n_max {
            for &(s, t) in &tree.quiver.arrows {
                let (x, y) = tree.nu((s, t));
                arrows.push((Vertex::Zt { n, t: s }, Vertex::Zt { n, t }, (x, y)));
                if n < n_max {
                    arrows.push((Vertex::Zt { n, t }, Vertex::Zt { n: n + 1, t: s }, (y, x)));
                }
            }
        }
        let tau_of = |v: &Vertex| match *v {
            Vertex::Zt { n, t } if n > n_min => Some(Vertex::Zt { n: n - 1, t }),
            _ => None,
        };
        let interior_of = |v: &Vertex| match *v {
            Vertex::Zt { n, t } => n > n_min && !tree.frontier.contains(&t),
            Vertex::Tube { .. } => false,
        };
        let ql_of = |v: &Vertex| match *v {
            Vertex::Zt { t, .. } => tree.ql.as_ref().map(|q| q[t]),
            Vertex::Tube { .. } => None,
        };
        let assembled = Self::assemble(vertices, arrows, tau_of, interior_of, ql_of);
        let kind = WindowKind::Zt { tree, n_min, n_max };
        Ok(QuiverWindow { kind, ..assembled })
    }

    /// The tube of the given rank, quasi-lengths `1..=max_ql`.
    pub fn tube(rank: usize, max_ql: usize) -> Result<Self> {
        if rank == 0 || max_ql == 0 {
            return Err(Error::Invalid("tube needs rank >= 1 and max_ql >= 1".into()));
        }
        let mut vertices = Vec::new();
        for q in 1..=max_ql {
            for k in 0..rank {
                vertices.push(Vertex::Tube { k, q });
            }
        }
        let mut arrows = Vec::new();
        for k in 0..rank {
            for q in 1..max_ql {
                arrows.push((Vertex::Tube { k, q }, Vertex::Tube { k, q: q + 1 }, (1, 1)));
                arrows.push((
                    Vertex::Tube { k, q: q + 1 },
                    Vertex::Tube { k: (k + 1) % rank, q },
                    (1, 1),
                ));
            }
        }
        let tau_of = |v: &Vertex| match *v {
            Vertex::Tube { k, q } => Some(Vertex::Tube {
                k: (k + rank - 1) % rank,
                q,
            }),
            Vertex::Zt { .. } => None,
        };
        let interior_of = |v: &Vertex| matches!(*v, Vertex::Tube { q, .. } if q < max_ql);
        let ql_of = |v: &Vertex| match *v {
            Vertex::Tube { q, .. } => Some(q),
            Vertex::Zt { .. } => None,
        };
        let assembled = Self::assemble(vertices, arrows, tau_of, interior_of, ql_of);
        Ok(QuiverWindow {
            kind: WindowKind::Tube { rank, max_ql },
            ..assembled
        })
    }

    fn assemble(
        vertices: Vec<Vertex>,
        raw: Vec<(Vertex, Vertex, Valuation)>,
        tau_of: impl Fn(&Vertex) -> Option<Vertex>,
        interior_of: impl Fn(&Vertex) -> bool,
        ql_of: impl Fn(&Vertex) -> Option<usize>,
    ) -> Self {
        let index: HashMap<Vertex, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut preds = vec![Vec::new(); vertices.len()];
        let mut succs = vec![Vec::new(); vertices.len()];
        let mut arrows = Vec::with_capacity(raw.len());
        for (a, b, valuation) in raw {
            let (from, to) = (index[&a], index[&b]);
            preds[to].push(arrows.len());
            succs[from].push(arrows.len());
            arrows.push(Arrow { from, to, valuation });
        }
        let tau = vertices
            .iter()
            .map(|v| tau_of(v).and_then(|w| index.get(&w).copied()))
            .collect();
        let interior = vertices.iter().map(&interior_of).collect();
        let ql = vertices.iter().map(&ql_of).collect();
        QuiverWindow {
            kind: WindowKind::Tube { rank: 0, max_ql: 0 },
            vertices,
            index,
            arrows,
            preds,
            succs,
            tau,
            interior,
            ql,
        }
    }

    pub fn kind(&self) -> &WindowKind {
        &self.kind
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn tau(&self, v: usize) -> Option<usize> {
        self.tau[v]
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }

    pub fn ql(&self, v: usize) -> Option<usize> {
        self.ql[v]
    }

    /// Predecessors of `v` with the valuation of the connecting arrow.
    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = (usize, Valuation)> + '_ {
        self.preds[v]
            .iter()
            .map(|&a| (self.arrows[a].from, self.arrows[a].valuation))
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = (usize, Valuation)> + '_ {
        self.succs[v]
            .iter()
            .map(|&a| (self.arrows[a].to, self.arrows[a].valuation))
    }

    pub fn arrow_valuation(&self, from: usize, to: usize) -> Option<Valuation> {
        self.succs[from]
            .iter()
            .map(|&a| self.arrows[a])
            .find(|a| a.to == to)
            .map(|a| a.valuation)
    }

    /// Arrows `a -> b` for which `tau(b) -> a` lies in the window but does not
    /// carry the swapped valuation. Empty for every window built here.
    pub fn valuation_defects(&self) -> Vec<(usize, usize)> {
        self.arrows
            .iter()
            .filter_map(|a| {
                let tb = self.tau[a.to]?;
                let back = self.arrow_valuation(tb, a.from)?;
                (back != (a.valuation.1, a.valuation.0)).then_some((a.from, a.to))
            })
            .collect()
    }

    /// Vertices whose full neighbourhood (both directions) lies in the window.
    fn fully_surrounded(&self, v: usize) -> bool {
        match (&self.kind, self.vertices[v]) {
            (WindowKind::Zt { tree, n_min, n_max }, Vertex::Zt { n, t }) => {
                n > *n_min && n < *n_max && !tree.frontier.contains(&t)
            }
            (WindowKind::Tube { max_ql, .. }, Vertex::Tube { q, .. }) => q < *max_ql,
            _ => false,
        }
    }

    fn orbit_label(&self, v: usize) -> usize {
        match self.vertices[v] {
            Vertex::Zt { t, .. } => t,
            Vertex::Tube { q, .. } => q - 1,
        }
    }

    fn orbit_names(&self) -> Vec<String> {
        match &self.kind {
            WindowKind::Zt { tree, .. } => (0..tree.quiver.vertices)
                .map(|t| match &tree.ql {
                    Some(ql) => format!("ql{}", ql[t]),
                    None => format!("t{t}"),
                })
                .collect(),
            WindowKind::Tube { max_ql, .. } => (1..=*max_ql).map(|q| format!("ql{q}")).collect(),
        }
    }

    fn act(&self, g: &Generator, v: Vertex, inverse: bool) -> Option<Vertex> {
        match (g, v) {
            (Generator::Trivial, _) => Some(v),
            (Generator::TauPower(k), Vertex::Zt { n, t }) => {
                let k = if inverse { -*k } else { *k };
                Some(Vertex::Zt { n: n - k, t })
            }
            (Generator::TauPower(k), Vertex::Tube { k: pos, q }) => {
                let WindowKind::Tube { rank, .. } = self.kind else {
                    return None;
                };
                let shift = if inverse { -*k } else { *k };
                let r = rank as i64;
                let pos = (pos as i64 - shift).rem_euclid(r) as usize;
                Some(Vertex::Tube { k: pos, q })
            }
            (Generator::TreeAutomorphism(perm), Vertex::Zt { n, t }) => {
                let image = if inverse {
                    perm.iter().position(|&s| s == t)?
                } else {
                    *perm.get(t)?
                };
                Some(Vertex::Zt { n, t: image })
            }
            (Generator::TreeAutomorphism(_), Vertex::Tube { .. }) => None,
        }
    }

    /// The part of the orbit `G x` that stays inside the window.
    pub fn orbit(&self, g: &Generator, x: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([x]);
        let mut stack = vec![x];
        while let Some(v) = stack.pop() {
            for inverse in [false, true] {
                if let Some(w) = self.act(g, self.vertices[v], inverse).and_then(|w| self.index_of(&w)) {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        seen
    }

    /// Tests `|Gx ∩ ({y} ∪ y+)| <= 1` and `|Gx ∩ ({y} ∪ y-)| <= 1` for every
    /// vertex `y` whose neighbourhood lies in the window.
    pub fn check_admissible(&self, g: &Generator) -> Result<Admissibility> {
        if let Generator::TreeAutomorphism(perm) = g {
            let WindowKind::Zt { tree, .. } = &self.kind else {
                return Err(Error::Invalid("tree automorphisms act on Z[T] windows only".into()));
            };
            check_tree_automorphism(tree, perm)?;
        }
        let orbit_of: Vec<BTreeSet<usize>> = (0..self.vertices.len()).map(|x| self.orbit(g, x)).collect();
        let mut tested = 0;
        for y in 0..self.vertices.len() {
            if !self.fully_surrounded(y) {
                continue;
            }
            tested += 1;
            let plus: BTreeSet<usize> = std::iter::once(y).chain(self.successors(y).map(|(w, _)| w)).collect();
            let minus: BTreeSet<usize> = std::iter::once(y).chain(self.predecessors(y).map(|(w, _)| w)).collect();
            for orbit in &orbit_of {
                if orbit.intersection(&plus).count() > 1 || orbit.intersection(&minus).count() > 1 {
                    let x = *orbit.first().expect("orbits are nonempty");
                    return Ok(Admissibility {
                        admissible: false,
                        violation: Some((self.vertices[x], self.vertices[y])),
                        tested,
                    });
                }
            }
        }
        Ok(Admissibility {
            admissible: true,
            violation: None,
            tested,
        })
    }

    /// Valued graph on the `tau`-orbits: `d([x],[y])` is the first component
    /// of the valuation of an arrow from `[x]` to `[y]`, zero if there is none.
    pub fn orbit_valued_graph(&self) -> Result<ValuedGraph> {
        let report = self.check_admissible(&Generator::TauPower(1))?;
        if let Some((x, y)) = report.violation {
            return Err(Error::Invalid(format!("<tau> is not admissible: orbit of {x} at {y}")));
        }
        let labels = self.orbit_names();
        let mut d = vec![vec![0u32; labels.len()]; labels.len()];
        for a in &self.arrows {
            d[self.orbit_label(a.from)][self.orbit_label(a.to)] = a.valuation.0;
        }
        Ok(ValuedGraph { labels, d })
    }

    /// Graphviz rendering; `tau` is drawn as dashed arrows. With a function,
    /// each vertex shows its value and interior vertices their additivity check.
    pub fn to_dot(&self, f: Option<&VertexFunction>) -> String {
        let checks: HashMap<usize, VertexCheck> = f
            .map(|f| f.checks().into_iter().map(|c| (c.vertex, c)).collect())
            .unwrap_or_default();
        let mut out = String::from("digraph window {\n  rankdir=BT;\n  node [shape=plaintext];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let mut label = match (v, self.ql[i]) {
                (Vertex::Zt { n, .. }, Some(q)) => format!("({n},{q})"),
                _ => v.to_string(),
            };
            if let Some(f) = f {
                write!(label, " f={}", f.values[i]).unwrap();
                if let Some(c) = checks.get(&i) {
                    label.push_str(if c.lhs == c.rhs { " PASS" } else { " FAIL" });
                }
            }
            writeln!(out, "  v{i} [label=\"{label}\"];").unwrap();
        }
        for a in &self.arrows {
            if a.valuation == (1, 1) {
                writeln!(out, "  v{} -> v{};", a.from, a.to).unwrap();
            } else {
                let (x, y) = a.valuation;
                writeln!(out, "  v{} -> v{} [label=\"({x},{y})\"];", a.from, a.to).unwrap();
            }
        }
        for (i, t) in self.tau.iter().enumerate() {
            if let Some(t) = t {
                writeln!(out, "  v{i} -> v{t} [style=dashed, constraint=false];").unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

fn check_tree_automorphism(tree: &Tree, perm: &[usize]) -> Result<()> {
    let n = tree.quiver.vertices;
    let distinct: BTreeSet<usize> = perm.iter().copied().collect();
    if perm.len() != n || distinct.len() != n || distinct.iter().any(|&s| s >= n) {
        return Err(Error::Invalid("tree automorphism must permute the tree nodes".into()));
    }
    let arrows: BTreeSet<(usize, usize)> = tree.quiver.arrows.iter().copied().collect();
    if arrows.iter().any(|&(s, t)| !arrows.contains(&(perm[s], perm[t]))) {
        return Err(Error::Invalid("permutation does not preserve the tree arrows".into()));
    }
    Ok(())
}

/// Generator of a cyclic group acting on a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    Trivial,
    TauPower(i64),
    TreeAutomorphism(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    pub violation: Option<(Vertex, Vertex)>,
    /// Number of vertices `y` checked.
    pub tested: usize,
}

/// Valued graph: `d[i][j]` is the valuation `d(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuedGraph {
    pub labels: Vec<String>,
    pub d: Vec<Vec<u32>>,
}

impl ValuedGraph {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Builds a simply laced graph from undirected edges.
    pub fn simply_laced(labels: Vec<String>, edges: &[(usize, usize)]) -> Self {
        let mut d = vec![vec![0; labels.len()]; labels.len()];
        for &(a, b) in edges {
            d[a][b] = 1;
            d[b][a] = 1;
        }
        ValuedGraph { labels, d }
    }

    /// `sum_i f(i) d(i, j)`.
    pub fn weighted_sum(&self, f: &[u64], j: usize) -> u128 {
        (0..self.len()).map(|i| f[i] as u128 * self.d[i][j] as u128).sum()
    }

    pub fn is_additive_at(&self, f: &[u64], j: usize) -> bool {
        2 * f[j] as u128 == self.weighted_sum(f, j)
    }

    pub fn has_symmetric_support(&self) -> bool {
        (0..self.len()).all(|i| (0..self.len()).all(|j| (self.d[i][j] == 0) == (self.d[j][i] == 0)))
    }

    pub fn to_dot(&self, values: Option<&[u64]>) -> String {
        let mut out = String::from("graph orbits {\n");
        for (i, l) in self.labels.iter().enumerate() {
            match values {
                Some(v) => writeln!(out, "  n{i} [label=\"{l}: {}\"];", v[i]).unwrap(),
                None => writeln!(out, "  n{i} [label=\"{l}\"];").unwrap(),
            }
        }
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let (a, b) = (self.d[i][j], self.d[j][i]);
                if a == 0 && b == 0 {
                    continue;
                }
                if (a, b) == (1, 1) {
                    writeln!(out, "  n{i} -- n{j};").unwrap();
                } else {
                    writeln!(out, "  n{i} -- n{j} [label=\"({a},{b})\"];").unwrap();
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Nonnegative integer values on every vertex of a window.
#[derive(Debug, Clone)]
pub struct VertexFunction<'w> {
    window: &'w QuiverWindow,
    values: Vec<u64>,
}

/// One interior vertex: `lhs = f(y) + f(tau y)`, `rhs` the weighted predecessor sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexCheck {
    pub vertex: usize,
    pub lhs: u128,
    pub rhs: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventualLevel {
    /// The minimal level `l` with additivity at every quasi-length `>= l`.
    Level(usize),
    /// The window has too few interior levels above the last failure.
    Indeterminate,
    /// No quasi-length labels on this window.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionReport {
    pub is_subadditive: bool,
    pub is_additive: bool,
    pub eventual_level: EventualLevel,
    pub checked: usize,
}

impl<'w> VertexFunction<'w> {
    pub fn new(window: &'w QuiverWindow, values: Vec<u64>) -> Result<Self> {
        if values.len() != window.vertices.len() {
            return Err(Error::Invalid(format!(
                "{} values for {} vertices",
                values.len(),
                window.vertices.len()
            )));
        }
        Ok(VertexFunction { window, values })
    }

    pub fn from_fn(window: &'w QuiverWindow, f: impl Fn(&Vertex) -> u64) -> Self {
        let values = window.vertices.iter().map(f).collect();
        VertexFunction { window, values }
    }

    /// A function of the quasi-length only.
    pub fn from_ql(window: &'w QuiverWindow, f: impl Fn(usize) -> u64) -> Result<Self> {
        let values = window
            .ql
            .iter()
            .map(|q| {
                q.map(&f)
                    .ok_or_else(|| Error::Invalid("window has no quasi-lengths".into()))
            })
            .collect::<Result<_>>()?;
        Ok(VertexFunction { window, values })
    }

    pub fn window(&self) -> &QuiverWindow {
        self.window
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn value(&self, v: usize) -> u64 {
        self.values[v]
    }

    pub fn is_tau_invariant(&self) -> bool {
        (0..self.values.len()).all(|v| self.window.tau[v].is_none_or(|t| self.values[t] == self.values[v]))
    }

    pub fn checks(&self) -> Vec<VertexCheck> {
        let w = self.window;
        (0..w.vertices.len())
            .filter(|&v| w.interior[v])
            .map(|v| {
                let t = w.tau[v].expect("interior vertices have a translate");
                let lhs = self.values[v] as u128 + self.values[t] as u128;
                let rhs = w
                    .predecessors(v)
                    .map(|(x, nu)| self.values[x] as u128 * nu.0 as u128)
                    .sum();
                VertexCheck { vertex: v, lhs, rhs }
            })
            .collect()
    }

    /// Subadditivity, additivity and the level `l(f)`, all read off interior
    /// vertices. A level is only reported when at least two interior
    /// quasi-lengths at or above it were checked.
    pub fn classify(&self) -> FunctionReport {
        let checks = self.checks();
        let is_subadditive = checks.iter().all(|c| c.lhs >= c.rhs);
        let is_additive = checks.iter().all(|c| c.lhs == c.rhs);
        let w = self.window;
        let levels: Option<Vec<(usize, bool)>> = checks
            .iter()
            .map(|c| w.ql[c.vertex].map(|q| (q, c.lhs == c.rhs)))
            .collect();
        let eventual_level = match levels {
            None => EventualLevel::NotApplicable,
            Some(levels) if levels.is_empty() => EventualLevel::Indeterminate,
            Some(levels) => {
                let top = levels.iter().map(|&(q, _)| q).max().expect("nonempty");
                let level = levels
                    .iter()
                    .filter(|&&(_, ok)| !ok)
                    .map(|&(q, _)| q + 1)
                    .max()
                    .unwrap_or(1);
                if top > level {
                    EventualLevel::Level(level)
                } else {
                    EventualLevel::Indeterminate
                }
            }
        };
        FunctionReport {
            is_subadditive,
            is_additive,
            eventual_level,
            checked: checks.len(),
        }
    }
}

pub fn classify_function(f: &VertexFunction) -> FunctionReport {
    f.classify()
}

/// Affine law `f(ql) = slope * ql + intercept`, valid for `ql >= valid_from`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineLaw {
    pub slope: BigInt,
    pub intercept: BigInt,
    pub valid_from: usize,
    /// Zero slope: the function is bounded, hence constant from `l - 1` on.
    pub bounded: bool,
}

impl AffineLaw {
    pub fn eval(&self, ql: usize) -> Option<BigInt> {
        (ql >= self.valid_from).then(|| &self.slope * BigInt::from(ql) + &self.intercept)
    }
}

impl fmt::Display for AffineLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f(ql) = {} for ql >= {}",
            affine_text(&self.slope, &self.intercept, "ql"),
            self.valid_from
        )
    }
}

pub(crate) fn affine_text(slope: &BigInt, intercept: &BigInt, var: &str) -> String {
    let mut s = String::new();
    if slope.is_zero() {
        return intercept.to_string();
    }
    if slope.is_one() {
        s.push_str(var);
    } else if *slope == -BigInt::one() {
        write!(s, "-{var}").unwrap();
    } else {
        write!(s, "{slope}*{var}").unwrap();
    }
    if intercept.is_positive() {
        write!(s, " + {intercept}").unwrap();
    } else if intercept.is_negative() {
        write!(s, " - {}", intercept.abs()).unwrap();
    }
    s
}

/// Closed form of an eventually additive function on an `A_inf` component
/// from its values at quasi-lengths `l - 1` and `l` (the former read as 0 when
/// `l = 1`).
pub fn extrapolate(level: usize, v_prev: u64, v_at: u64) -> Result<AffineLaw> {
    if level == 0 {
        return Err(Error::out_of_range("level", 0, 1, i64::MAX));
    }
    let prev = if level == 1 { 0 } else { v_prev };
    let slope = BigInt::from(v_at) - BigInt::from(prev);
    let intercept = BigInt::from(v_at) - &slope * BigInt::from(level);
    let bounded = slope.is_zero();
    let valid_from = if bounded { (level - 1).max(1) } else { level };
    Ok(AffineLaw {
        slope,
        intercept,
        valid_from,
        bounded,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeClass {
    AInf,
    AInfInf,
    A12Tilde,
    DInf,
    DTilde(usize),
    E6Tilde,
    E7Tilde,
    E8Tilde,
    FiniteDynkin(String),
}

impl fmt::Display for TreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeClass::AInf => f.write_str("A_inf"),
            TreeClass::AInfInf => f.write_str("A_inf_inf"),
            TreeClass::A12Tilde => f.write_str("A12_tilde"),
            TreeClass::DInf => f.write_str("D_inf"),
            TreeClass::DTilde(n) => write!(f, "D{n}_tilde"),
            TreeClass::E6Tilde => f.write_str("E6_tilde"),
            TreeClass::E7Tilde => f.write_str("E7_tilde"),
            TreeClass::E8Tilde => f.write_str("E8_tilde"),
            TreeClass::FiniteDynkin(name) => write!(f, "finite:{name}"),
        }
    }
}

impl FromStr for TreeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            pos: 0,
            msg: format!("unknown tree class {s:?}"),
        };
        Ok(match s {
            "A_inf" => TreeClass::AInf,
            "A_inf_inf" => TreeClass::AInfInf,
            "A12_tilde" => TreeClass::A12Tilde,
            "D_inf" => TreeClass::DInf,
            "E6_tilde" => TreeClass::E6Tilde,
            "E7_tilde" => TreeClass::E7Tilde,
            "E8_tilde" => TreeClass::E8Tilde,
            _ => {
                if let Some(name) = s.strip_prefix("finite:") {
                    TreeClass::FiniteDynkin(name.to_string())
                } else if let Some(n) = s.strip_prefix('D').and_then(|r| r.strip_suffix("_tilde")) {
                    let n: usize = n.parse().map_err(|_| bad())?;
                    if n < 4 {
                        return Err(Error::out_of_range("n", n as i128, 4, i64::MAX));
                    }
                    TreeClass::DTilde(n)
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl Serialize for TreeClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TreeClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The generator of the additive functions on a tree class, evaluated on a
/// finite section of its graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalAdditive {
    pub tree_class: TreeClass,
    pub graph: ValuedGraph,
    pub values: Vec<u64>,
    /// Nodes whose neighbourhood lies in the section.
    pub interior: Vec<bool>,
    /// Number of distinct values; `None` when unbounded.
    pub image_size: Option<usize>,
}

impl MinimalAdditive {
    pub fn is_additive(&self) -> bool {
        (0..self.graph.len())
            .filter(|&j| self.interior[j])
            .all(|j| self.graph.is_additive_at(&self.values, j))
    }
}

/// Minimal additive function. Infinite classes are shown on a section with
/// `span` chain nodes; Euclidean classes are solved as the integer kernel of
/// `2I - D` and need no truncation.
///
/// Node orders for the Euclidean classes:
/// `D_n~`: leaves 0, 1, inner chain `2..n-2`, leaves `n-1, n`;
/// `E6~`: chain 0-1-2-3-4 with arm 2-5-6;
/// `E7~`: chain 0-..-6 with node 7 on node 3;
/// `E8~`: chain 0-..-7 with node 8 on node 5.
pub fn minimal_additive_function(tc: &TreeClass, span: usize) -> Result<MinimalAdditive> {
    let labels = |n: usize| (0..n).map(|i| format!("x{i}")).collect::<Vec<_>>();
    let span = span.max(3);
    let (graph, values, interior) = match tc {
        TreeClass::FiniteDynkin(name) => {
            return Err(Error::Invalid(format!(
                "finite Dynkin class {name} carries no nonzero additive function"
            )))
        }
        TreeClass::AInf => {
            let edges: Vec<_> = (1..span).map(|i| (i - 1, i)).collect();
            let interior = (0..span).map(|i| i + 1 < span).collect();
            (
                ValuedGraph::simply_laced(labels(span), &edges),
                (1..=span as u64).collect(),
                interior,
            )
        }
        TreeClass::AInfInf => {
            let edges: Vec<_> = (1..span).map(|i| (i - 1, i)).collect();
            let interior = (0..span).map(|i| i > 0 && i + 1 < span).collect();
            (ValuedGraph::simply_laced(labels(span), &edges), vec![1; span], interior)
        }
        TreeClass::DInf => {
            let n = span + 2;
            let mut edges = vec![(0, 2), (1, 2)];
            edges.extend((3..n).map(|i| (i - 1, i)));
            let values = (0..n).map(|i| if i < 2 { 1 } else { 2 }).collect();
            let interior = (0..n).map(|i| i + 1 < n).collect();
            (ValuedGraph::simply_laced(labels(n), &edges), values, interior)
        }
        euclidean => {
            let graph = euclidean_graph(euclidean);
            let values = integer_kernel(&graph)?;
            let n = graph.len();
            (graph, values, vec![true; n])
        }
    };
    let image_size = match tc {
        TreeClass::AInf => None,
        _ => Some(values.iter().collect::<BTreeSet<_>>().len()),
    };
    Ok(MinimalAdditive {
        tree_class: tc.clone(),
        graph,
        values,
        interior,
        image_size,
    })
}

fn euclidean_graph(tc: &TreeClass) -> ValuedGraph {
    let labels = |n: usize| (0..n).map(|i| format!("x{i}")).collect::<Vec<_>>();
    let chain = |n: usize| (1..n).map(|i| (i - 1, i)).collect::<Vec<_>>();
    match tc {
        TreeClass::A12Tilde => ValuedGraph {
            labels: labels(2),
            d: vec![vec![0, 2], vec![2, 0]],
        },
        TreeClass::DTilde(n) => {
            let n = *n;
            let (first, last) = (2, n - 2);
            let mut edges: Vec<_> = (first + 1..=last).map(|i| (i - 1, i)).collect();
            edges.extend([(0, first), (1, first), (n - 1, last), (n, last)]);
            ValuedGraph::simply_laced(labels(n + 1), &edges)
        }
        TreeClass::E6Tilde => {
            let mut edges = chain(5);
            edges.extend([(2, 5), (5, 6)]);
            ValuedGraph::simply_laced(labels(7), &edges)
        }
        TreeClass::E7Tilde => {
            let mut edges = chain(7);
            edges.push((3, 7));
            ValuedGraph::simply_laced(labels(8), &edges)
        }
        TreeClass::E8Tilde => {
            let mut edges = chain(8);
            edges.push((5, 8));
            ValuedGraph::simply_laced(labels(9), &edges)
        }
        _ => unreachable!("not a Euclidean class"),
    }
}

/// Primitive positive generator of the kernel of `(2I - D)^T`.
fn integer_kernel(graph: &ValuedGraph) -> Result<Vec<u64>> {
    let n = graph.len();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let diag = if i == j { 2 } else { 0 };
                    BigRational::from_integer(BigInt::from(diag - graph.d[i][j] as i64))
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(r) = (row..n).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, r);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return Err(Error::Invalid(format!(
            "kernel has dimension {}, expected 1",
            free.len()
        )));
    }
    let mut v = vec![BigRational::zero(); n];
    v[free[0]] = BigRational::one();
    for (r, &c) in pivots.iter().enumerate() {
        v[c] = -m[r][free[0]].clone();
    }
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = if ints.iter().any(Signed::is_negative) {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    ints.iter()
        .map(|x| {
            let y = x / &gcd * &sign;
            y.is_positive()
                .then(|| y.to_u64())
                .flatten()
                .ok_or_else(|| Error::Invalid("kernel vector is not positive".into()))
        })
        .collect()
}

/// Window description as read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WindowSpec {
    Tube {
        rank: usize,
        max_ql: usize,
    },
    Zt {
        tree: TreeSpec,
        #[serde(default)]
        n_min: i64,
        n_max: i64,
        #[serde(default)]
        max_ql: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeSpec {
    /// `"A_inf"` or `"A_inf_inf"`, cut at `max_ql` nodes.
    Named(String),
    Explicit(Quiver),
}

impl WindowSpec {
    pub fn build(&self) -> Result<QuiverWindow> {
        match self {
            WindowSpec::Tube { rank, max_ql } => QuiverWindow::tube(*rank, *max_ql),
            WindowSpec::Zt {
                tree,
                n_min,
                n_max,
                max_ql,
            } => {
                let len = || max_ql.ok_or_else(|| Error::Invalid("named trees need max_ql".into()));
                let tree = match tree {
                    TreeSpec::Named(name) if name == "A_inf" => Tree::a_inf(len()?)?,
                    TreeSpec::Named(name) if name == "A_inf_inf" => Tree::a_inf_inf(len()?)?,
                    TreeSpec::Named(name) => return Err(Error::Invalid(format!("no window for tree {name:?}"))),
                    TreeSpec::Explicit(q) => Tree::new(Quiver::new(q.vertices, q.arrows.clone())?),
                };
                QuiverWindow::zt(tree, *n_min, *n_max)
            }
        }
    }
}
