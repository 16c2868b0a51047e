use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write;

use num_traits::Float;

use super::family::{body_key, std_distance, EquivariantFamily, KEY_LEN};
use super::potential::{potential_integral, Potential};
use super::PerpError;
use crate::dedup::QuantIndex;
use crate::exec::{Executor, Sequential};
use crate::geom::{common_perpendicular, CommonPerp, ConvexBody, GeomError, Isometry, Point};
use crate::groups::{Completeness, GroupKind, GroupSpec};

/// Positive rational multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Multiplicity {
    pub num: u32,
    pub den: u32,
}

impl Multiplicity {
    pub const ONE: Multiplicity = Multiplicity { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Self {
        let g = gcd(num, den).max(1);
        Multiplicity { num: num / g, den: den / g }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// One common perpendicular from `D⁻` to a translate `γD⁺`, standing for
/// its double coset `Γ_{D⁻} γ Γ_{D⁺}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerpRecord {
    pub perp: CommonPerp,
    pub witness: Isometry,
    pub coset_key: String,
    pub weight: f64,
    /// Inverse order of the subgroup of `Γ_{D⁻}` preserving `γD⁺`.
    pub multiplicity: Multiplicity,
    /// Order of the subgroup of `Γ_{D⁻}` fixing the initial vector.
    pub vector_stabilizer: u32,
    pub foot_minus_datum: [f64; 2],
    pub foot_plus_datum: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoSpectrum {
    pub records: Vec<PerpRecord>,
    pub t_max: f64,
    pub completeness: Completeness,
    /// Coset keys of translates tangent to `D⁻`.
    pub tangencies: Vec<String>,
    /// Number of translates visited.
    pub bodies_visited: usize,
}

impl OrthoSpectrum {
    pub fn lengths(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.perp.length).collect()
    }
}

/// Tuning of the enumeration.
#[derive(Clone, Debug)]
pub struct EngineOptions {
    /// Extra radius beyond `t_max` plus the covering radius of `D⁺`.
    pub margin: f64,
    pub max_bodies: usize,
    /// Cap on stabilizer orbit points visited per translate.
    pub max_probes: usize,
    pub potential: Potential,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { margin: 1.0, max_bodies: 5_000_000, max_probes: 1_000_000, potential: Potential::Zero }
    }
}

struct Node {
    witness: Isometry,
    body: ConvexBody,
}

struct Candidate {
    witness: Isometry,
    body: ConvexBody,
    key: [f64; KEY_LEN],
}

struct Ctx<'a> {
    fm: &'a EquivariantFamily,
    fp: &'a EquivariantFamily,
    letters: &'a [Isometry],
    stab_letters: Vec<Isometry>,
    /// Elements of `Γ_{D⁺}` fixing `x⁺`; each gives its own neighbours.
    fixer: Vec<Isometry>,
    x_plus: Point,
    radius: f64,
    probe_radius: f64,
    max_probes: usize,
}

const CONFIRM: f64 = 1e-9;

fn point_key(p: &Point) -> [f64; 3] {
    [p.z.re, p.z.im, p.h.ln()]
}

impl Ctx<'_> {
    /// Orbit point of `g` in the normalized frame of `D⁻`.
    fn probe(&self, g: &Isometry) -> Point {
        let r = (*self.fm.normalizer() * *g).apply_point(&self.x_plus);
        r
    }

    fn body_of(&self, g: &Isometry) -> ConvexBody {
        self.fp.base.apply(&(*self.fm.normalizer() * *g))
    }

    /// Pulls `m` (normalized frame) back to the original frame.
    fn lift(&self, m: &Isometry) -> Isometry {
        (*self.fm.normalizer_inv() * *m) * *self.fm.normalizer()
    }

    fn explore(&self, node: &Node, known: &QuantIndex<KEY_LEN>, nodes: &[Node]) -> Result<Vec<Candidate>, PerpError> {
        let mut seen = QuantIndex::<3>::new(1e-6, 1e-8);
        let mut pts: Vec<Point> = Vec::new();
        let mut stack = vec![node.witness];
        let start = self.probe(&node.witness);
        seen.insert(&point_key(&start), 0);
        pts.push(start);
        let mut out: Vec<Candidate> = Vec::new();
        while let Some(g) = stack.pop() {
            let p = self.probe(&g);
            if std_distance(&self.fm.base, &p) <= self.radius {
                for (f, s) in self.fixer.iter().flat_map(|f| self.letters.iter().map(move |s| (f, s))) {
                    let child = ((g * *f) * *s).renormalized();
                    let q = self.probe(&child);
                    if std_distance(&self.fm.base, &q) > self.radius {
                        continue;
                    }
                    let (b, m) = self.fm.reduce(&self.body_of(&child));
                    let key = body_key(&b);
                    let same = |other: &ConvexBody| other.approx_eq(&b, CONFIRM);
                    if known.find(&key, |id| same(&nodes[id].body)).is_some() {
                        continue;
                    }
                    if out.iter().any(|c| same(&c.body)) {
                        continue;
                    }
                    out.push(Candidate { witness: (self.lift(&m) * child).renormalized(), body: b, key });
                }
            }
            for k in &self.stab_letters {
                let h = g * *k;
                let q = self.probe(&h);
                if std_distance(&self.fm.base, &q) > self.probe_radius {
                    continue;
                }
                let (rq, m) = self.fm.reduce(&ConvexBody::Point(q));
                let rq = match rq {
                    ConvexBody::Point(p) => p,
                    _ => unreachable!("points reduce to points"),
                };
                let pk = point_key(&rq);
                if seen.find(&pk, |id| crate::geom::hyp_dist(&pts[id], &rq).map_or(false, |d| d <= CONFIRM)).is_some() {
                    continue;
                }
                seen.insert(&pk, pts.len());
                pts.push(rq);
                if pts.len() > self.max_probes {
                    return Err(PerpError::InvalidFamily("stabilizer orbit of a translate does not leave the search region"));
                }
                stack.push((self.lift(&m) * h).renormalized());
            }
        }
        Ok(out)
    }
}

fn quantize(x: f64) -> i64 {
    (x * 1e6).round() as i64
}

/// Readable coset key: quantized length and canonical body key.
fn coset_key(length: f64, key: &[f64; KEY_LEN]) -> String {
    let mut s = String::new();
    let _ = write!(s, "{}", quantize(length));
    for k in key {
        let _ = write!(s, ":{}", quantize(*k));
    }
    s
}

/// Common perpendiculars from `D⁻` to the translates of `D⁺` with length in
/// `(0, t_max]`, one per double coset.
pub fn find_common_perpendiculars(
    fm: &EquivariantFamily,
    fp: &EquivariantFamily,
    g: &GroupSpec,
    t_max: f64,
) -> Result<OrthoSpectrum, PerpError> {
    find_common_perpendiculars_with(fm, fp, g, t_max, &EngineOptions::default(), &Sequential)
}

/// Explores the translates `γD⁺` modulo `Γ_{D⁻}`. Each translate is kept in
/// canonical position under `Γ_{D⁻}`, so translates correspond one to one to
/// double cosets. From a translate, the orbit points `γhx⁺` (`h ∈ Γ_{D⁺}`,
/// `x⁺` the reference point of `D⁺`) within the search radius of `D⁻` are
/// visited, and every generator step from them gives a neighbouring
/// translate. The search radius is `t_max` plus the covering radius of the
/// orbit of `x⁺` on `D⁺` plus the margin, so every translate within `t_max`
/// has an orbit point inside it.
pub fn find_common_perpendiculars_with<E: Executor>(
    fm: &EquivariantFamily,
    fp: &EquivariantFamily,
    g: &GroupSpec,
    t_max: f64,
    opts: &EngineOptions,
    exec: &E,
) -> Result<OrthoSpectrum, PerpError> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(PerpError::InvalidArgument("t_max must be positive"));
    }
    if fm.dim() != g.dim || fp.dim() != g.dim {
        return Err(PerpError::DimensionMismatch);
    }
    let rho = fp.covering_radius();
    if !rho.is_finite() {
        return Err(PerpError::InvalidFamily("stabilizer of D⁺ is not cocompact on its boundary"));
    }
    let radius = t_max + rho + opts.margin;
    let mut stab_letters = Vec::new();
    for s in &fp.stabilizer {
        stab_letters.push(*s);
        stab_letters.push(s.inverse());
    }
    let ctx = Ctx {
        fm,
        fp,
        letters: g.letters(),
        stab_letters,
        fixer: fp.reference_fixer(),
        x_plus: fp.reference_point(),
        radius,
        probe_radius: radius + 2.0 * rho,
        max_probes: opts.max_probes,
    };

    let mut nodes: Vec<Node> = Vec::new();
    let mut index = QuantIndex::<KEY_LEN>::new(1e-6, 1e-8);
    let id = Isometry::identity(g.dim);
    let (b0, m0) = fm.reduce(&ctx.body_of(&id));
    index.insert(&body_key(&b0), 0);
    nodes.push(Node { witness: ctx.lift(&m0), body: b0 });
    let mut frontier = vec![0usize];
    let mut budget_hit = false;
    while !frontier.is_empty() {
        let found: Vec<Result<Vec<Candidate>, PerpError>> =
            exec.map(&frontier, |&i| ctx.explore(&nodes[i], &index, &nodes));
        let mut next = Vec::new();
        for cands in found {
            for c in cands? {
                if index.find(&c.key, |id| nodes[id].body.approx_eq(&c.body, CONFIRM)).is_some() {
                    continue;
                }
                let id = nodes.len();
                index.insert(&c.key, id);
                nodes.push(Node { witness: c.witness, body: c.body });
                next.push(id);
            }
        }
        if nodes.len() > opts.max_bodies {
            budget_hit = true;
            break;
        }
        frontier = next;
    }

    let std_minus = fm.base.apply(fm.normalizer());
    let norm_inv = *fm.normalizer_inv();
    let made: Vec<Option<Result<PerpRecord, String>>> = exec.map(&nodes, |n| {
        let key = body_key(&n.body);
        match common_perpendicular(&std_minus, &n.body) {
            Ok(p) if p.length <= t_max => {
                let perp = CommonPerp {
                    length: p.length,
                    v_minus: p.v_minus.apply(&norm_inv),
                    v_plus: p.v_plus.apply(&norm_inv),
                    foot_minus: norm_inv.apply_point(&p.foot_minus),
                    foot_plus: norm_inv.apply_point(&p.foot_plus),
                };
                let weight = potential_integral(&opts.potential, &perp.v_minus, perp.length).exp();
                let body = fp.base.apply(&n.witness);
                let pair = fm.stabilizer_order_of(&body) as u32;
                let back = n.witness.inverse();
                Some(Ok(PerpRecord {
                    coset_key: coset_key(perp.length, &key),
                    witness: n.witness,
                    weight,
                    multiplicity: Multiplicity::new(1, pair.max(1)),
                    vector_stabilizer: fm.vector_stabilizer_order(&perp.v_minus) as u32,
                    foot_minus_datum: fm.foot_datum(&perp.v_minus),
                    foot_plus_datum: fp.foot_datum(&perp.v_plus.flip().apply(&back)),
                    perp,
                }))
            }
            Ok(_) => None,
            Err(GeomError::Tangent) => Some(Err(coset_key(0.0, &key))),
            Err(_) => None,
        }
    });
    let mut records = Vec::new();
    let mut tangencies = Vec::new();
    for m in made.into_iter().flatten() {
        match m {
            Ok(r) => records.push(r),
            Err(k) => tangencies.push(k),
        }
    }
    records.sort_by(|a, b| {
        a.perp.length.partial_cmp(&b.perp.length).unwrap_or(Ordering::Equal).then_with(|| a.coset_key.cmp(&b.coset_key))
    });
    tangencies.sort();
    let spectrum = OrthoSpectrum {
        records,
        t_max,
        completeness: if budget_hit { Completeness::Incomplete } else { Completeness::Heuristic },
        tangencies,
        bodies_visited: nodes.len(),
    };
    if budget_hit {
        return Err(PerpError::BudgetExceeded { reason: "translate cap", partial: Box::new(spectrum) });
    }
    Ok(spectrum)
}

/// `N(t) = Σ_{ℓ ≤ t} multiplicity · e^{∫F}` on the grid.
pub fn counting_function(spec: &OrthoSpectrum, f: &Potential, t_grid: &[f64]) -> Result<Vec<(f64, f64)>, PerpError> {
    if let Some(&t) = t_grid.iter().find(|t| **t > spec.t_max * (1.0 + 1e-12)) {
        return Err(PerpError::GridBeyondSpectrum { t, t_max: spec.t_max });
    }
    let weights: Vec<f64> = spec
        .records
        .iter()
        .map(|r| r.multiplicity.value() * potential_integral(f, &r.perp.v_minus, r.perp.length).exp())
        .collect();
    Ok(t_grid
        .iter()
        .map(|&t| {
            let n: f64 = spec.records.iter().zip(&weights).filter(|(r, _)| r.perp.length <= t).map(|(_, w)| *w).sum();
            (t, n)
        })
        .collect())
}

/// Witness as a word: `S`/`T` powers for the modular group, the matrix
/// otherwise.
pub fn witness_word(g: &GroupSpec, w: &Isometry) -> String {
    if g.kind == GroupKind::Modular {
        if let Some(word) = modular_word(w) {
            return word;
        }
    }
    let e = w.entries();
    if w.dim == crate::geom::Dim::Two {
        format!("[{},{};{},{}]", e[0].re, e[1].re, e[2].re, e[3].re)
    } else {
        format!("[{}{:+}i,{}{:+}i;{}{:+}i,{}{:+}i]", e[0].re, e[0].im, e[1].re, e[1].im, e[2].re, e[2].im, e[3].re, e[3].im)
    }
}

/// Euclidean decomposition of an integral unimodular matrix.
fn modular_word(w: &Isometry) -> Option<String> {
    let r = |x: f64| {
        let y = x.round();
        ((x - y).abs() < 1e-6).then_some(y as i64)
    };
    let (mut a, mut b, mut c, mut d) = (r(w.a.re)?, r(w.b.re)?, r(w.c.re)?, r(w.d.re)?);
    let mut left: Vec<String> = Vec::new();
    let mut guard = 0;
    while c != 0 {
        guard += 1;
        if guard > 200 {
            return None;
        }
        let n = (a as f64 / c as f64).round() as i64;
        if n != 0 {
            a -= n * c;
            b -= n * d;
            left.push(format!("T^{n}"));
        }
        let (na, nb, nc, nd) = (-c, -d, a, b);
        a = na;
        b = nb;
        c = nc;
        d = nd;
        left.push("S".into());
    }
    let t = if a < 0 { -b } else { b };
    if t != 0 {
        left.push(format!("T^{t}"));
    }
    if left.is_empty() {
        return Some("e".into());
    }
    Some(left.join(" "))
}

