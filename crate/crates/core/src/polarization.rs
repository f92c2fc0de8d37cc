//! Induced-polarization consistency for the w₁ = 2 instanton family as a finite
//! constraint problem.
//!
//! A fixed point `(s,t)` carries dual pairs of normal summands `C(a,b)/C(b,a)`.
//! A choice picks one label per pair. For each wall and each wall-component, the
//! multiset of nonzero restrictions of the chosen weights must agree at every
//! point of the component.
//!
//! Internally the multiset condition is split by magnitude: for each magnitude
//! `m`, the number of chosen `+m` restrictions must agree. Groups holding one
//! pair per point become parity constraints, so UNSAT is certified by an
//! odd cycle of forced selections.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dynkin::TypeSign;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolarizationError {
    #[error("instances need ℓ ≥ 2, got {0}")]
    TooSmall(u8),
    #[error("choice at {point}: {detail}")]
    BadChoice { point: Point, detail: String },
    #[error("cannot parse label '{0}'")]
    Parse(String),
}

/// Torus weight `a·u1 + b·u2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WeightVec {
    pub a: i64,
    pub b: i64,
}

impl WeightVec {
    pub fn new(a: i64, b: i64) -> WeightVec {
        WeightVec { a, b }
    }

    /// Pairing with a direction vector in Lie(A).
    pub fn restrict(self, dir: WeightVec) -> i64 {
        self.a * dir.a + self.b * dir.b
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl std::ops::Neg for WeightVec {
    type Output = WeightVec;
    fn neg(self) -> WeightVec {
        WeightVec::new(-self.a, -self.b)
    }
}

impl fmt::Display for WeightVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (c, v) in [(self.a, "u1"), (self.b, "u2")] {
            if c == 0 {
                continue;
            }
            let mag = c.abs();
            let body = if mag == 1 { v.to_string() } else { format!("{mag}{v}") };
            if out.is_empty() {
                out = if c < 0 { format!("-{body}") } else { body };
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// Summand name `C(a,b)` with `a, b ∈ {±1, ±2}`, stored in a canonical
/// representative of the identification `C(a,b) ≅ C(-b,-a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub a: i8,
    pub b: i8,
}

impl Label {
    /// Canonical form: more positive indices first, then the smaller `a`.
    pub fn new(a: i8, b: i8) -> Label {
        assert!(matches!(a.abs(), 1 | 2) && matches!(b.abs(), 1 | 2), "C({a},{b}) out of range");
        let x = Label { a, b };
        let y = Label { a: -b, b: -a };
        let key = |l: Label| (-((l.a > 0) as i8 + (l.b > 0) as i8), l.a);
        if key(y) < key(x) { y } else { x }
    }

    /// `u_b − u_a` with `u_{−k} = −u_k`.
    pub fn weight(self) -> WeightVec {
        let u = |k: i8| {
            let s = k.signum() as i64;
            if k.abs() == 1 { WeightVec::new(s, 0) } else { WeightVec::new(0, s) }
        };
        let (wa, wb) = (u(self.a), u(self.b));
        WeightVec::new(wb.a - wa.a, wb.b - wa.b)
    }

    /// The dual summand `C(b,a)`.
    pub fn dual(self) -> Label {
        Label::new(self.b, self.a)
    }

    /// Image under exchanging the torus coordinates `u1 ↔ u2`.
    pub fn swap_coordinates(self) -> Label {
        let tau = |k: i8| k.signum() * (3 - k.abs());
        Label::new(tau(self.a), tau(self.b))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({},{})", self.a, self.b)
    }
}

impl FromStr for Label {
    type Err = PolarizationError;
    fn from_str(s: &str) -> Result<Label, PolarizationError> {
        let err = || PolarizationError::Parse(s.to_string());
        let inner = s.trim().strip_prefix("C(").and_then(|r| r.strip_suffix(')')).ok_or_else(err)?;
        let (a, b) = inner.split_once(',').ok_or_else(err)?;
        let a: i8 = a.trim().parse().map_err(|_| err())?;
        let b: i8 = b.trim().parse().map_err(|_| err())?;
        if !matches!(a.abs(), 1 | 2) || !matches!(b.abs(), 1 | 2) {
            return Err(err());
        }
        Ok(Label::new(a, b))
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Fixed point indexed by the entries `s = T(1,1)`, `t = T(2,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Point(pub u8, pub u8);

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DualPair {
    pub first: Label,
    pub second: Label,
    /// Weight of `first`; `second` carries its negation.
    pub weight: WeightVec,
}

impl DualPair {
    pub fn new(first: Label) -> DualPair {
        DualPair { first, second: first.dual(), weight: first.weight() }
    }

    pub fn contains(&self, l: Label) -> bool {
        l == self.first || l == self.second
    }

    pub fn weight_of(&self, l: Label) -> Option<WeightVec> {
        if l == self.first {
            Some(self.weight)
        } else if l == self.second {
            Some(-self.weight)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Site {
    pub point: Point,
    pub pairs: Vec<DualPair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Wall {
    pub name: String,
    /// The wall is `functional = 0`.
    pub functional: WeightVec,
    /// Spans the wall; weights restrict by pairing with it.
    pub direction: WeightVec,
    pub components: Vec<Vec<Point>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolarizationInstance {
    pub sign: TypeSign,
    pub ell: u8,
    /// Sorted by point; `(s,t)` sits at `(s−1)ℓ + (t−1)`.
    pub sites: Vec<Site>,
    pub walls: Vec<Wall>,
}

impl PolarizationInstance {
    pub fn site_index(&self, p: Point) -> Option<usize> {
        let l = self.ell as usize;
        let (s, t) = (p.0 as usize, p.1 as usize);
        (1..=l).contains(&s).then_some(())?;
        (1..=l).contains(&t).then_some(())?;
        Some((s - 1) * l + (t - 1))
    }

    pub fn site(&self, p: Point) -> Option<&Site> {
        self.site_index(p).map(|i| &self.sites[i])
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.sites.iter().map(|s| s.point)
    }

    /// `2·#pairs` at `p`.
    pub fn tangent_dimension(&self, p: Point) -> usize {
        self.site(p).map_or(0, |s| 2 * s.pairs.len())
    }

    pub fn wall(&self, name: &str) -> Option<&Wall> {
        self.walls.iter().find(|w| w.name == name)
    }
}

fn partition(points: &[Point], key: impl Fn(Point) -> Option<u8>) -> Vec<Vec<Point>> {
    let mut groups: BTreeMap<u8, Vec<Point>> = BTreeMap::new();
    let mut out = Vec::new();
    for &p in points {
        match key(p) {
            Some(k) => groups.entry(k).or_default().push(p),
            None => out.push(vec![p]),
        }
    }
    let mut all: Vec<Vec<Point>> = groups.into_values().chain(out).collect();
    all.sort();
    all
}

/// The Sp (`Minus`) or SO (`Plus`) instance at `w₁ = 2`.
pub fn build_instance(sign: TypeSign, ell: u8) -> Result<PolarizationInstance, PolarizationError> {
    if ell < 2 {
        return Err(PolarizationError::TooSmall(ell));
    }
    let mut sites = Vec::new();
    for s in 1..=ell {
        for t in 1..=ell {
            let mut pairs = Vec::new();
            if sign == TypeSign::Minus {
                pairs.push(DualPair::new(Label::new(1, -1)));
                pairs.push(DualPair::new(Label::new(2, -2)));
            }
            pairs.push(DualPair::new(if s != t { Label::new(1, 2) } else { Label::new(1, -2) }));
            sites.push(Site { point: Point(s, t), pairs });
        }
    }
    let points: Vec<Point> = sites.iter().map(|s| s.point).collect();
    let sp = sign == TypeSign::Minus;

    let mut diag_swap = Vec::new();
    for &p in &points {
        if p.0 < p.1 {
            diag_swap.push(vec![p, Point(p.1, p.0)]);
        } else if p.0 == p.1 {
            diag_swap.push(vec![p]);
        }
    }
    diag_swap.sort();

    let walls = vec![
        Wall {
            name: "u1=u2".into(),
            functional: WeightVec::new(1, -1),
            direction: WeightVec::new(1, 1),
            components: diag_swap,
        },
        Wall {
            name: "u1+u2=0".into(),
            functional: WeightVec::new(1, 1),
            direction: WeightVec::new(1, -1),
            components: partition(&points, |p| (p.0 == p.1).then_some(0)),
        },
        Wall {
            name: "u1=0".into(),
            functional: WeightVec::new(1, 0),
            direction: WeightVec::new(0, 1),
            components: partition(&points, |p| sp.then_some(p.1)),
        },
        Wall {
            name: "u2=0".into(),
            functional: WeightVec::new(0, 1),
            direction: WeightVec::new(1, 0),
            components: partition(&points, |p| sp.then_some(p.0)),
        },
    ];
    Ok(PolarizationInstance { sign, ell, sites, walls })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SiteChoice {
    pub point: Point,
    /// One label per pair, in the order of the site's pairs.
    pub labels: Vec<Label>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Choice {
    pub sites: Vec<SiteChoice>,
}

impl Choice {
    pub fn from_fn(inst: &PolarizationInstance, f: impl Fn(Point, &DualPair) -> Label) -> Choice {
        Choice {
            sites: inst
                .sites
                .iter()
                .map(|s| SiteChoice { point: s.point, labels: s.pairs.iter().map(|p| f(s.point, p)).collect() })
                .collect(),
        }
    }

    /// Picks the first label of every pair.
    pub fn all_first(inst: &PolarizationInstance) -> Choice {
        Choice::from_fn(inst, |_, p| p.first)
    }

    /// Builds a choice from selected labels, placing each at the pair that
    /// contains it. Pairs left unmentioned make the result partial.
    pub fn from_selected(
        inst: &PolarizationInstance,
        selected: impl IntoIterator<Item = (Point, Label)>,
    ) -> Result<Choice, PolarizationError> {
        let mut labels: Vec<Vec<Option<Label>>> = inst.sites.iter().map(|s| vec![None; s.pairs.len()]).collect();
        for (p, l) in selected {
            let bad = |detail: String| PolarizationError::BadChoice { point: p, detail };
            let i = inst.site_index(p).ok_or_else(|| bad("no such point".into()))?;
            let j = inst.sites[i].pairs.iter().position(|d| d.contains(l)).ok_or_else(|| bad(format!("{l} is not present")))?;
            labels[i][j] = Some(l);
        }
        let mut sites = Vec::new();
        for (site, ls) in inst.sites.iter().zip(labels) {
            let ls = ls
                .into_iter()
                .zip(&site.pairs)
                .map(|(l, d)| {
                    l.ok_or_else(|| PolarizationError::BadChoice {
                        point: site.point,
                        detail: format!("no label chosen for {}/{}", d.first, d.second),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            sites.push(SiteChoice { point: site.point, labels: ls });
        }
        Ok(Choice { sites })
    }

    pub fn selected(&self) -> impl Iterator<Item = (Point, Label)> + '_ {
        self.sites.iter().flat_map(|s| s.labels.iter().map(move |&l| (s.point, l)))
    }

    pub fn get(&self, p: Point) -> Option<&[Label]> {
        self.sites.iter().find(|s| s.point == p).map(|s| s.labels.as_slice())
    }

    /// Transport along `u1 ↔ u2`: the point `(s,t)` goes to `(t,s)`.
    pub fn swap_coordinates(&self, inst: &PolarizationInstance) -> Result<Choice, PolarizationError> {
        Choice::from_selected(inst, self.selected().map(|(p, l)| (Point(p.1, p.0), l.swap_coordinates())))
    }

    /// Transport along a permutation of the entries `1..=ℓ` (`perm[i-1]` is the image of `i`).
    pub fn relabel_entries(&self, inst: &PolarizationInstance, perm: &[u8]) -> Result<Choice, PolarizationError> {
        Choice::from_selected(inst, self.selected().map(|(p, l)| (Point(perm[p.0 as usize - 1], perm[p.1 as usize - 1]), l)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub wall: String,
    pub component: usize,
    pub points: Vec<Point>,
    /// Sorted nonzero restrictions of the chosen weights, per point.
    pub restricted: Vec<Vec<i64>>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wall {} component {}:", self.wall, self.component)?;
        for (p, r) in self.points.iter().zip(&self.restricted) {
            write!(f, " {p}→{r:?}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

fn validate(inst: &PolarizationInstance, c: &Choice) -> Result<(), PolarizationError> {
    if c.sites.len() != inst.sites.len() {
        return Err(PolarizationError::BadChoice {
            point: Point(0, 0),
            detail: format!("{} sites chosen, instance has {}", c.sites.len(), inst.sites.len()),
        });
    }
    for (site, sc) in inst.sites.iter().zip(&c.sites) {
        let bad = |detail: String| PolarizationError::BadChoice { point: site.point, detail };
        if sc.point != site.point {
            return Err(bad(format!("sites out of order, found {}", sc.point)));
        }
        if sc.labels.len() != site.pairs.len() {
            return Err(bad(format!("{} labels for {} pairs", sc.labels.len(), site.pairs.len())));
        }
        for (l, d) in sc.labels.iter().zip(&site.pairs) {
            if !d.contains(*l) {
                return Err(bad(format!("{l} does not belong to {}/{}", d.first, d.second)));
            }
        }
    }
    Ok(())
}

/// Checks the uniformity of restricted weights on every wall-component.
pub fn check_choice(inst: &PolarizationInstance, c: &Choice) -> Result<ChoiceReport, PolarizationError> {
    validate(inst, c)?;
    let mut violations = Vec::new();
    for wall in &inst.walls {
        for (ci, comp) in wall.components.iter().enumerate() {
            if comp.len() < 2 {
                continue;
            }
            let restricted: Vec<Vec<i64>> = comp
                .iter()
                .map(|&p| {
                    let i = inst.site_index(p).expect("component point");
                    let mut r: Vec<i64> = c.sites[i]
                        .labels
                        .iter()
                        .map(|l| l.weight().restrict(wall.direction))
                        .filter(|&x| x != 0)
                        .collect();
                    r.sort();
                    r
                })
                .collect();
            if restricted.iter().any(|r| *r != restricted[0]) {
                violations.push(Violation { wall: wall.name.clone(), component: ci, points: comp.clone(), restricted });
            }
        }
    }
    Ok(ChoiceReport { ok: violations.is_empty(), violations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Backtracking over every pair variable.
    Exhaustive,
    /// Parity propagation first, then backtracking over the remaining classes.
    Propagation,
}

impl Strategy {
    pub fn default_for(ell: u8) -> Strategy {
        if ell <= 4 { Strategy::Exhaustive } else { Strategy::Propagation }
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "propagation" => Ok(Strategy::Propagation),
            _ => Err(format!("unknown strategy '{s}' (expected exhaustive or propagation)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Selection {
    pub point: Point,
    pub label: Label,
}

/// Choosing `from` forces choosing `to`: both are the only pair of their
/// restricted magnitude at their point, on a common wall-component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub wall: String,
    pub component: usize,
    pub from: Selection,
    pub to: Selection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Certificate {
    /// Forced steps from a selection back to its dual.
    OddCycle { steps: Vec<Step> },
    /// Points of one component disagree on how many pairs restrict to `±magnitude`.
    CountMismatch { wall: String, component: usize, magnitude: i64 },
    /// No short certificate; the search tree was exhausted.
    Exhausted { nodes: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Outcome {
    #[serde(rename = "SAT")]
    Sat { witness: Choice },
    #[serde(rename = "UNSAT")]
    Unsat { certificate: Certificate },
}

impl Outcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, Outcome::Sat { .. })
    }

    pub fn verdict(&self) -> &'static str {
        if self.is_sat() { "SAT" } else { "UNSAT" }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub sign: TypeSign,
    pub ell: u8,
    pub strategy: Strategy,
    /// Search nodes visited (deterministic).
    pub nodes: u64,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// Pair variable: `true` selects the pair's first label.
#[derive(Clone, Copy, Debug)]
struct Var {
    site: usize,
    pair: usize,
}

/// Magnitude-`m` slice of one component: per point, the variables restricting
/// to `±m`, each with the flag "first label restricts to −m".
#[derive(Debug)]
struct Group {
    wall: usize,
    component: usize,
    members: Vec<Vec<(usize, bool)>>,
}

struct Model {
    vars: Vec<Var>,
    groups: Vec<Group>,
}

fn model(inst: &PolarizationInstance) -> Result<Model, Certificate> {
    let mut vars = Vec::new();
    let mut base = Vec::new();
    for (i, s) in inst.sites.iter().enumerate() {
        base.push(vars.len());
        vars.extend((0..s.pairs.len()).map(|j| Var { site: i, pair: j }));
    }
    let mut groups = Vec::new();
    for (wi, wall) in inst.walls.iter().enumerate() {
        for (ci, comp) in wall.components.iter().enumerate() {
            if comp.len() < 2 {
                continue;
            }
            let mut by_mag: BTreeMap<i64, Vec<Vec<(usize, bool)>>> = BTreeMap::new();
            for (k, &p) in comp.iter().enumerate() {
                let i = inst.site_index(p).expect("component point");
                for (j, d) in inst.sites[i].pairs.iter().enumerate() {
                    let r = d.weight.restrict(wall.direction);
                    if r != 0 {
                        let slot = by_mag.entry(r.abs()).or_insert_with(|| vec![Vec::new(); comp.len()]);
                        slot[k].push((base[i] + j, r < 0));
                    }
                }
            }
            for (m, members) in by_mag {
                if members.iter().any(|v| v.len() != members[0].len()) {
                    return Err(Certificate::CountMismatch { wall: wall.name.clone(), component: ci, magnitude: m });
                }
                groups.push(Group { wall: wi, component: ci, members });
            }
        }
    }
    Ok(Model { vars, groups })
}

/// Variable values through classes: `x_v = class_value[class] ^ parity`.
struct Classes {
    of: Vec<(usize, bool)>,
    count: usize,
}

fn group_holds(g: &Group, value: &dyn Fn(usize) -> bool) -> bool {
    let positives = |ms: &Vec<(usize, bool)>| ms.iter().filter(|&&(v, neg)| value(v) ^ neg).count();
    let first = positives(&g.members[0]);
    g.members.iter().all(|ms| positives(ms) == first)
}

/// Backtracking over classes, one independent block at a time.
fn search(m: &Model, cl: &Classes) -> (Option<Vec<bool>>, u64) {
    // blocks of classes linked by groups
    let mut parent: Vec<usize> = (0..cl.count).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for g in &m.groups {
        let cs: Vec<usize> = g.members.iter().flatten().map(|&(v, _)| cl.of[v].0).collect();
        for w in cs.windows(2) {
            let (a, b) = (root(&mut parent, w[0]), root(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for c in 0..cl.count {
        let r = root(&mut parent, c);
        blocks.entry(r).or_default().push(c);
    }
    let mut block_groups: BTreeMap<usize, Vec<&Group>> = BTreeMap::new();
    for g in &m.groups {
        let c = g.members.iter().flatten().next().map(|&(v, _)| cl.of[v].0);
        if let Some(c) = c {
            block_groups.entry(root(&mut parent, c)).or_default().push(g);
        }
    }
    let blocks: Vec<(Vec<usize>, Vec<&Group>)> =
        blocks.into_iter().map(|(r, cs)| (cs, block_groups.remove(&r).unwrap_or_default())).collect();

    let results: Vec<BlockResult> =
        blocks.par_iter().map(|(cs, gs)| search_block(cs, gs, cl)).collect();
    let mut values = vec![true; cl.count];
    let mut nodes = 0;
    let mut sat = true;
    for (r, n) in results {
        nodes += n;
        match r {
            Some(assign) => assign.into_iter().for_each(|(c, x)| values[c] = x),
            None => sat = false,
        }
    }
    (sat.then_some(values), nodes)
}

/// Class values for a satisfiable block (`None` if it has none), and nodes visited.
type BlockResult = (Option<Vec<(usize, bool)>>, u64);

fn search_block(classes: &[usize], groups: &[&Group], cl: &Classes) -> BlockResult {
    let pos: BTreeMap<usize, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    // groups become checkable once their last class is assigned
    let mut due: Vec<Vec<&Group>> = vec![Vec::new(); classes.len()];
    for g in groups {
        let last = g.members.iter().flatten().map(|&(v, _)| pos[&cl.of[v].0]).max().expect("nonempty group");
        due[last].push(g);
    }
    let mut vals = vec![false; classes.len()];
    let mut nodes = 0u64;

    fn go(
        k: usize,
        vals: &mut Vec<bool>,
        nodes: &mut u64,
        due: &[Vec<&Group>],
        pos: &BTreeMap<usize, usize>,
        cl: &Classes,
    ) -> bool {
        if k == vals.len() {
            return true;
        }
        for x in [true, false] {
            *nodes += 1;
            vals[k] = x;
            let ok = due[k].iter().all(|g| {
                group_holds(g, &|v| {
                    let (c, par) = cl.of[v];
                    vals[pos[&c]] ^ par
                })
            });
            if ok && go(k + 1, vals, nodes, due, pos, cl) {
                return true;
            }
        }
        false
    }

    let found = go(0, &mut vals, &mut nodes, &due, &pos, cl);
    (found.then(|| classes.iter().copied().zip(vals).collect()), nodes)
}

/// Forced-equality edges from groups with one variable per point.
struct Edge {
    to: usize,
    parity: bool,
    group: usize,
}

fn parity_edges(m: &Model) -> Vec<Vec<Edge>> {
    let mut adj: Vec<Vec<Edge>> = (0..m.vars.len()).map(|_| Vec::new()).collect();
    for (gi, g) in m.groups.iter().enumerate() {
        if g.members.iter().any(|ms| ms.len() != 1) {
            continue;
        }
        for (i, a) in g.members.iter().enumerate() {
            for (j, b) in g.members.iter().enumerate() {
                if i != j {
                    let ((va, na), (vb, nb)) = (a[0], b[0]);
                    adj[va].push(Edge { to: vb, parity: na ^ nb, group: gi });
                }
            }
        }
    }
    adj
}

/// Union-find with parity over the forced edges; `None` on contradiction.
fn propagate(m: &Model, adj: &[Vec<Edge>]) -> Option<Classes> {
    let n = m.vars.len();
    let mut parent: Vec<(usize, bool)> = (0..n).map(|v| (v, false)).collect();
    fn find(p: &mut [(usize, bool)], x: usize) -> (usize, bool) {
        let (up, par) = p[x];
        if up == x {
            return (x, false);
        }
        let (r, rp) = find(p, up);
        p[x] = (r, par ^ rp);
        (r, par ^ rp)
    }
    for (v, es) in adj.iter().enumerate() {
        for e in es {
            let (ra, pa) = find(&mut parent, v);
            let (rb, pb) = find(&mut parent, e.to);
            if ra == rb {
                if pa ^ pb != e.parity {
                    return None;
                }
            } else {
                parent[ra.max(rb)] = (ra.min(rb), pa ^ pb ^ e.parity);
            }
        }
    }
    let mut ids = BTreeMap::new();
    let mut of = Vec::with_capacity(n);
    for v in 0..n {
        let (r, p) = find(&mut parent, v);
        let next = ids.len();
        let id = *ids.entry(r).or_insert(next);
        of.push((id, p));
    }
    Some(Classes { of, count: ids.len() })
}

/// Shortest odd closed walk in the parity graph, lowest start variable on ties.
fn shortest_odd_cycle(adj: &[Vec<Edge>]) -> Option<(usize, Vec<(usize, usize)>)> {
    let n = adj.len();
    let mut best: Option<(usize, Vec<(usize, usize)>)> = None;
    for s in 0..n {
        // state = 2·var + parity; pred holds (state, edge index at var)
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; 2 * n];
        let mut seen = vec![false; 2 * n];
        seen[2 * s] = true;
        let mut queue = VecDeque::from([2 * s]);
        while let Some(st) = queue.pop_front() {
            if st == 2 * s + 1 {
                break;
            }
            let (v, p) = (st / 2, st % 2 == 1);
            for (ei, e) in adj[v].iter().enumerate() {
                let next = 2 * e.to + (p ^ e.parity) as usize;
                if !seen[next] {
                    seen[next] = true;
                    pred[next] = Some((st, ei));
                    queue.push_back(next);
                }
            }
        }
        if !seen[2 * s + 1] {
            continue;
        }
        let mut path = Vec::new();
        let mut st = 2 * s + 1;
        while let Some((prev, ei)) = pred[st] {
            path.push((prev / 2, ei));
            st = prev;
        }
        path.reverse();
        if best.as_ref().is_none_or(|(_, b)| path.len() < b.len()) {
            best = Some((s, path));
        }
    }
    best
}

fn label_of(inst: &PolarizationInstance, v: Var, x: bool) -> Label {
    let d = &inst.sites[v.site].pairs[v.pair];
    if x { d.first } else { d.second }
}

fn cycle_certificate(inst: &PolarizationInstance, m: &Model, adj: &[Vec<Edge>]) -> Option<Certificate> {
    let (start, path) = shortest_odd_cycle(adj)?;
    let sel = |v: usize, x: bool| Selection { point: inst.sites[m.vars[v].site].point, label: label_of(inst, m.vars[v], x) };
    let mut x = true;
    let mut steps = Vec::new();
    let mut cur = start;
    for (v, ei) in path {
        debug_assert_eq!(v, cur);
        let e = &adj[v][ei];
        let y = x ^ e.parity;
        let g = &m.groups[e.group];
        steps.push(Step {
            wall: inst.walls[g.wall].name.clone(),
            component: g.component,
            from: sel(v, x),
            to: sel(e.to, y),
        });
        x = y;
        cur = e.to;
    }
    debug_assert!(cur == start && !x);
    Some(Certificate::OddCycle { steps })
}

pub fn solve(inst: &PolarizationInstance) -> SolveReport {
    solve_with(inst, Strategy::default_for(inst.ell))
}

pub fn solve_with(inst: &PolarizationInstance, strategy: Strategy) -> SolveReport {
    let report = |nodes, outcome| SolveReport { sign: inst.sign, ell: inst.ell, strategy, nodes, outcome };
    let m = match model(inst) {
        Ok(m) => m,
        Err(cert) => return report(0, Outcome::Unsat { certificate: cert }),
    };
    let adj = parity_edges(&m);
    let classes = match strategy {
        Strategy::Exhaustive => Classes { of: (0..m.vars.len()).map(|v| (v, false)).collect(), count: m.vars.len() },
        Strategy::Propagation => match propagate(&m, &adj) {
            Some(c) => c,
            None => {
                let cert = cycle_certificate(inst, &m, &adj).expect("a parity conflict has an odd cycle");
                return report(0, Outcome::Unsat { certificate: cert });
            }
        },
    };
    let (values, nodes) = search(&m, &classes);
    match values {
        Some(vals) => {
            let mut sites: Vec<SiteChoice> =
                inst.sites.iter().map(|s| SiteChoice { point: s.point, labels: Vec::new() }).collect();
            for (v, var) in m.vars.iter().enumerate() {
                let (c, par) = classes.of[v];
                sites[var.site].labels.push(label_of(inst, *var, vals[c] ^ par));
            }
            report(nodes, Outcome::Sat { witness: Choice { sites } })
        }
        None => {
            let cert = cycle_certificate(inst, &m, &adj).unwrap_or(Certificate::Exhausted { nodes });
            report(nodes, Outcome::Unsat { certificate: cert })
        }
    }
}

fn pair_at(inst: &PolarizationInstance, sel: &Selection) -> Result<DualPair, String> {
    let site = inst.site(sel.point).ok_or_else(|| format!("no point {}", sel.point))?;
    site.pairs.iter().copied().find(|d| d.contains(sel.label)).ok_or_else(|| format!("{} absent at {}", sel.label, sel.point))
}

/// Independent check of a certificate against the instance.
pub fn verify_certificate(inst: &PolarizationInstance, cert: &Certificate) -> Result<(), String> {
    match cert {
        Certificate::Exhausted { .. } => Err("exhaustion is not independently checkable".into()),
        Certificate::CountMismatch { wall, component, magnitude } => {
            let w = inst.wall(wall).ok_or_else(|| format!("no wall {wall}"))?;
            let comp = w.components.get(*component).ok_or("no such component")?;
            let counts: Vec<usize> = comp
                .iter()
                .map(|&p| {
                    inst.site(p).map_or(0, |s| {
                        s.pairs.iter().filter(|d| d.weight.restrict(w.direction).abs() == *magnitude).count()
                    })
                })
                .collect();
            if counts.iter().all(|&c| c == counts[0]) {
                return Err(format!("counts agree: {counts:?}"));
            }
            Ok(())
        }
        Certificate::OddCycle { steps } => {
            let first = steps.first().ok_or("empty cycle")?;
            for (i, st) in steps.iter().enumerate() {
                let w = inst.wall(&st.wall).ok_or_else(|| format!("step {i}: no wall {}", st.wall))?;
                let comp = w.components.get(st.component).ok_or_else(|| format!("step {i}: no component"))?;
                if st.from.point == st.to.point || !comp.contains(&st.from.point) || !comp.contains(&st.to.point) {
                    return Err(format!("step {i}: points not distinct members of the component"));
                }
                let (pf, pt) = (pair_at(inst, &st.from)?, pair_at(inst, &st.to)?);
                let rf = pf.weight_of(st.from.label).expect("label in pair").restrict(w.direction);
                let rt = pt.weight_of(st.to.label).expect("label in pair").restrict(w.direction);
                if rf == 0 || rf != rt {
                    return Err(format!("step {i}: restrictions {rf} and {rt} do not force"));
                }
                for p in [st.from.point, st.to.point] {
                    let site = inst.site(p).expect("checked");
                    let k = site.pairs.iter().filter(|d| d.weight.restrict(w.direction).abs() == rf.abs()).count();
                    if k != 1 {
                        return Err(format!("step {i}: {k} pairs of magnitude {} at {p}", rf.abs()));
                    }
                }
                if let Some(next) = steps.get(i + 1) {
                    if next.from != st.to {
                        return Err(format!("step {i}: chain broken"));
                    }
                }
            }
            let last = steps.last().expect("nonempty");
            if last.to.point != first.from.point || last.to.label != first.from.label.dual() {
                return Err("cycle does not return to the dual selection".into());
            }
            Ok(())
        }
    }
}
