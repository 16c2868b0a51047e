//! Discrete groups: presets, word and displacement balls with matrix
//! deduplication, stabilizers, modular reduction and critical exponents.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use thiserror::Error;

use crate::dedup::QuantIndex;
use crate::exec::Executor;
use crate::geom::{hyp_dist, BoundaryPoint, ConvexBody, Dim, Isometry, Point, UnitTangent};
use crate::perp::{potential_integral, Potential};
use crate::tol::Tolerances;
use crate::C64;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GroupError {
    #[error("closed discs {0} and {1} overlap")]
    CirclesOverlap(usize, usize),
    #[error("pairing {0} does not map its circle onto its partner")]
    InvalidPairing(usize),
    #[error("operation needs the modular group")]
    NotModular,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("budget exceeded: {reason}")]
    BudgetExceeded { reason: &'static str, partial: Box<WordBall> },
    #[error("insufficient data: {0}")]
    InsufficientData(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

/// Circle `|z − center| = radius` in the boundary plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: C64, radius: f64) -> Self {
        Circle { center, radius }
    }

    /// Image of the closed disc under `g`, assuming the pole of `g` lies
    /// outside it. Symmetric points go to symmetric points, so the image of
    /// the reflection of the pole is the new center.
    pub fn image(&self, g: &Isometry) -> Circle {
        if g.c.norm() <= 1e-300 {
            let center = (g.a * self.center + g.b) / g.d;
            return Circle { center, radius: self.radius * (g.a / g.d).norm() };
        }
        let pole = -g.d / g.c;
        let mobius = |z: C64| (g.a * z + g.b) / (g.c * z + g.d);
        let star = self.center + (self.radius * self.radius) / (pole - self.center).conj();
        let center = mobius(star);
        let on = self.center + C64::new(self.radius, 0.0);
        Circle { center, radius: (mobius(on) - center).norm() }
    }

    /// Distance from `x` to the hemisphere over the circle, or 0 if `x` lies
    /// under it.
    pub fn hemisphere_distance(&self, x: &Point) -> f64 {
        let s = ((x.z - self.center).norm_sqr() + x.h * x.h - self.radius * self.radius) / (2.0 * self.radius * x.h);
        s.max(0.0).asinh()
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

/// A generator of a Schottky group: `map` sends the exterior of `from` onto
/// the interior of `to`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CirclePairing {
    pub from: Circle,
    pub to: Circle,
    pub map: Isometry,
}

impl CirclePairing {
    /// The pairing `z ↦ c₂ − r₁r₂/(z − c₁)`.
    pub fn standard(dim: Dim, from: Circle, to: Circle) -> Self {
        let (c1, c2) = (from.center, to.center);
        let rr = from.radius * to.radius;
        let one = C64::new(1.0, 0.0);
        let map = Isometry::scaled(dim, c2, -c1 * c2 - rr, one, -c1).expect("positive radii");
        CirclePairing { from, to, map }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupKind {
    Modular,
    Schottky(Vec<CirclePairing>),
    Custom,
}

/// A finitely generated group with its letters (generators and inverses).
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    pub generators: Vec<Isometry>,
    pub kind: GroupKind,
    pub label: String,
    pub dim: Dim,
    letters: Vec<Isometry>,
    inverse: Vec<usize>,
    /// For Schottky groups, the disc containing the limit points of words
    /// starting with each letter.
    discs: Vec<Circle>,
}

impl GroupSpec {
    pub fn custom(dim: Dim, generators: Vec<Isometry>, label: &str) -> Result<Self, GroupError> {
        if generators.iter().any(|g| g.dim != dim) {
            return Err(GroupError::DimensionMismatch);
        }
        Ok(Self::build(dim, generators, GroupKind::Custom, label))
    }

    fn build(dim: Dim, generators: Vec<Isometry>, kind: GroupKind, label: &str) -> Self {
        let mut letters: Vec<Isometry> = Vec::new();
        for g in &generators {
            if !letters.iter().any(|l| l.approx_eq(g, 1e-9)) {
                letters.push(*g);
            }
        }
        let base = letters.clone();
        for g in base {
            let inv = g.inverse();
            if !letters.iter().any(|l| l.approx_eq(&inv, 1e-9)) {
                letters.push(inv);
            }
        }
        let inverse = letters
            .iter()
            .map(|l| {
                let inv = l.inverse();
                letters.iter().position(|m| m.approx_eq(&inv, 1e-9)).expect("closed under inverses")
            })
            .collect();
        GroupSpec { generators, kind, label: label.into(), dim, letters, inverse, discs: Vec::new() }
    }

    pub fn letters(&self) -> &[Isometry] {
        &self.letters
    }

    pub fn inverse_letter(&self, i: usize) -> usize {
        self.inverse[i]
    }

    /// Image disc of each letter (Schottky groups only).
    pub fn letter_discs(&self) -> &[Circle] {
        &self.discs
    }

    pub fn is_schottky(&self) -> bool {
        matches!(self.kind, GroupKind::Schottky(_))
    }

    /// Product of the letters of `word`.
    pub fn evaluate(&self, word: &[u16]) -> Isometry {
        word.iter().fold(Isometry::identity(self.dim), |g, &l| g * self.letters[l as usize])
    }

    /// The group `h Γ h⁻¹`; Schottky circles are moved along.
    pub fn conjugate(&self, h: &Isometry) -> Result<Self, GroupError> {
        let hinv = h.inverse();
        let gens: Vec<Isometry> = self.generators.iter().map(|g| (h * g) * hinv).collect();
        match &self.kind {
            GroupKind::Schottky(ps) => {
                let moved = ps
                    .iter()
                    .map(|p| CirclePairing {
                        from: p.from.image(h),
                        to: p.to.image(h),
                        map: (h * &p.map) * hinv,
                    })
                    .collect();
                schottky(self.dim, moved, &self.label)
            }
            GroupKind::Modular => Ok(Self::build(self.dim, gens, GroupKind::Custom, &self.label)),
            GroupKind::Custom => Self::custom(self.dim, gens, &self.label),
        }
    }
}

/// `PSL(2, ℤ)` with generators `S: z ↦ −1/z`, `T: z ↦ z + 1` and `T⁻¹`.
pub fn preset_modular() -> GroupSpec {
    let s = Isometry::real(0.0, -1.0, 1.0, 0.0).expect("unimodular");
    let t = Isometry::real(1.0, 1.0, 0.0, 1.0).expect("unimodular");
    GroupSpec::build(Dim::Two, vec![s, t, t.inverse()], GroupKind::Modular, "modular")
}

/// Schottky group from circle pairings, certified by the ping-pong
/// condition: all closed discs pairwise disjoint and every pairing sending
/// the exterior of one circle onto the interior of its partner.
pub fn schottky(dim: Dim, pairings: Vec<CirclePairing>, label: &str) -> Result<GroupSpec, GroupError> {
    let circles: Vec<Circle> = pairings.iter().flat_map(|p| [p.from, p.to]).collect();
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let (a, b) = (circles[i], circles[j]);
            if (a.center - b.center).norm() <= a.radius + b.radius {
                return Err(GroupError::CirclesOverlap(i, j));
            }
        }
    }
    for (k, p) in pairings.iter().enumerate() {
        if p.map.dim != dim {
            return Err(GroupError::DimensionMismatch);
        }
        let img = p.from.image(&p.map);
        let tol = 1e-9 * (1.0 + p.to.radius + p.to.center.norm());
        let far = p.map.apply_boundary(&BoundaryPoint::Infinity);
        let inside = match far {
            BoundaryPoint::Finite(z) => p.to.contains(z),
            BoundaryPoint::Infinity => false,
        };
        if (img.center - p.to.center).norm() > tol || (img.radius - p.to.radius).abs() > tol || !inside {
            return Err(GroupError::InvalidPairing(k));
        }
    }
    let gens: Vec<Isometry> = pairings.iter().map(|p| p.map).collect();
    let mut letters = Vec::new();
    let mut discs = Vec::new();
    let mut inverse = Vec::new();
    for (k, p) in pairings.iter().enumerate() {
        letters.push(p.map);
        letters.push(p.map.inverse());
        discs.push(p.to);
        discs.push(p.from);
        inverse.push(2 * k + 1);
        inverse.push(2 * k);
    }
    Ok(GroupSpec {
        generators: gens,
        kind: GroupKind::Schottky(pairings),
        label: label.into(),
        dim,
        letters,
        inverse,
        discs,
    })
}

/// Rank-2 Schottky group with radius-`r` circles centred at `±d` and `±d·i`,
/// paired by the standard inversive maps.
pub fn preset_schottky_symmetric(d: f64, r: f64) -> Result<GroupSpec, GroupError> {
    let c = |x: f64, y: f64| Circle::new(C64::new(x, y), r);
    schottky(
        Dim::Three,
        vec![
            CirclePairing::standard(Dim::Three, c(-d, 0.0), c(d, 0.0)),
            CirclePairing::standard(Dim::Three, c(0.0, -d), c(0.0, d)),
        ],
        "schottky-symmetric",
    )
}

/// How far an enumeration can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Completeness {
    /// Guaranteed by a geometric lower bound.
    Complete,
    /// Stopped by the two-empty-shells rule plus one safety shell.
    Heuristic,
    /// A budget was exhausted.
    Incomplete,
}

impl Completeness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Completeness::Complete => "complete",
            Completeness::Heuristic => "heuristic",
            Completeness::Incomplete => "incomplete",
        }
    }
}

/// Two inequivalent words whose matrices agree within ten times the
/// confirmation tolerance but not within it.
#[derive(Clone, Debug, PartialEq)]
pub struct NearCollision {
    pub first: usize,
    pub second: usize,
    pub distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallElement {
    pub g: Isometry,
    pub disp: f64,
    pub word_len: u32,
    parent: u32,
    letter: u16,
}

/// Deduplicated set of group elements with their words, stored as a tree of
/// parent pointers.
#[derive(Clone, Debug, PartialEq)]
pub struct WordBall {
    pub elements: Vec<BallElement>,
    pub completeness: Completeness,
    pub warnings: Vec<NearCollision>,
    pub radius: f64,
}

impl WordBall {
    pub fn word(&self, i: usize) -> Vec<u16> {
        let mut w = Vec::new();
        let mut k = i;
        while k != 0 {
            let e = &self.elements[k];
            w.push(e.letter);
            k = e.parent as usize;
        }
        w.reverse();
        w
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, g: &Isometry, tol: f64) -> Option<usize> {
        self.elements.iter().position(|e| e.g.approx_eq(g, tol))
    }
}

/// Caps for enumerations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallLimits {
    pub max_elements: usize,
    pub max_word_len: u32,
    /// Elements up to this much beyond the radius are expanded but not
    /// reported.
    pub prune_slack: f64,
}

impl Default for BallLimits {
    fn default() -> Self {
        BallLimits { max_elements: 10_000_000, max_word_len: 4096, prune_slack: 1.0 }
    }
}

fn key(g: &Isometry) -> [f64; 8] {
    let e = g.entries();
    [e[0].re, e[0].im, e[1].re, e[1].im, e[2].re, e[2].im, e[3].re, e[3].im]
}

fn neg_key(g: &Isometry) -> [f64; 8] {
    let mut k = key(g);
    for x in &mut k {
        *x = -*x;
    }
    k
}

struct Dedup {
    index: QuantIndex<8>,
    confirm: f64,
}

enum Lookup {
    Found,
    Near(usize, f64),
    New,
}

impl Dedup {
    fn new() -> Self {
        let t = Tolerances::DEFAULT;
        Dedup { index: QuantIndex::new(t.dedup_grid, 10.0 * t.dedup_confirm), confirm: t.dedup_confirm }
    }

    fn lookup(&self, g: &Isometry, elems: &[BallElement]) -> Lookup {
        let scale = g.entries().iter().fold(1.0f64, |m, e| m.max(e.norm()));
        let tol = self.confirm * scale;
        let mut near = None;
        for k in [key(g), neg_key(g)] {
            let hit = self.index.find(&k, |id| {
                let d = elems[id].g.distance(g);
                if d > tol && d <= 10.0 * tol && near.is_none() {
                    near = Some((id, d));
                }
                d <= tol
            });
            if hit.is_some() {
                return Lookup::Found;
            }
        }
        match near {
            Some((id, d)) => Lookup::Near(id, d),
            None => Lookup::New,
        }
    }

    fn insert(&mut self, g: &Isometry, id: usize) {
        self.index.insert(&key(g), id);
    }
}

fn root(dim: Dim) -> BallElement {
    BallElement { g: Isometry::identity(dim), disp: 0.0, word_len: 0, parent: 0, letter: 0 }
}

/// All distinct elements of word length at most `max_len`.
pub fn enumerate_word_ball(g: &GroupSpec, max_len: u32, max_elements: usize) -> Result<WordBall, GroupError> {
    let mut elems = vec![root(g.dim)];
    let mut dedup = Dedup::new();
    dedup.insert(&elems[0].g, 0);
    let mut warnings = Vec::new();
    let mut frontier = vec![0usize];
    for len in 1..=max_len {
        let mut next = Vec::new();
        for &i in &frontier {
            for (l, s) in g.letters.iter().enumerate() {
                let h = elems[i].g * *s;
                match dedup.lookup(&h, &elems) {
                    Lookup::Found => continue,
                    Lookup::Near(id, d) => warnings.push(NearCollision { first: id, second: elems.len(), distance: d }),
                    Lookup::New => {}
                }
                let id = elems.len();
                dedup.insert(&h, id);
                elems.push(BallElement { g: h, disp: 0.0, word_len: len, parent: i as u32, letter: l as u16 });
                next.push(id);
                if elems.len() > max_elements {
                    let partial = WordBall { elements: elems, completeness: Completeness::Incomplete, warnings, radius: 0.0 };
                    return Err(GroupError::BudgetExceeded { reason: "element cap", partial: Box::new(partial) });
                }
            }
        }
        frontier = next;
    }
    Ok(WordBall { elements: elems, completeness: Completeness::Complete, warnings, radius: f64::NAN })
}

/// Every `γ` with `d(x0, γ x0) ≤ r`.
///
/// Schottky groups are searched depth first over reduced words; a branch is
/// cut once the hemisphere over its nested disc, which contains the orbit
/// points of all its extensions, is farther than `r`. Other groups grow by
/// word length, expanding elements within `r + prune_slack`, until two
/// consecutive shells add nothing within `r`, plus one safety shell.
pub fn enumerate_displacement_ball<E: Executor>(
    g: &GroupSpec,
    x0: &Point,
    r: f64,
    limits: &BallLimits,
    exec: &E,
) -> Result<WordBall, GroupError> {
    if x0.dim != g.dim {
        return Err(GroupError::DimensionMismatch);
    }
    if !(r >= 0.0) {
        return Err(GroupError::InvalidArgument("radius must be nonnegative"));
    }
    if g.is_schottky() && g.discs.iter().all(|c| c.hemisphere_distance(x0) > 0.0) {
        return schottky_ball(g, x0, r, limits);
    }
    bfs_ball(g, x0, r, limits, exec)
}

fn schottky_ball(g: &GroupSpec, x0: &Point, r: f64, limits: &BallLimits) -> Result<WordBall, GroupError> {
    let mut elems = vec![root(g.dim)];
    // (element index, nested disc of the word)
    let mut stack: Vec<(usize, Option<Circle>)> = vec![(0, None)];
    while let Some((i, _)) = stack.pop() {
        let e = elems[i];
        let last = if i == 0 { None } else { Some(e.letter as usize) };
        let mut children = Vec::new();
        for l in 0..g.letters.len() {
            if Some(g.inverse[l]) == last {
                continue;
            }
            let disc = g.discs[l].image(&e.g);
            if disc.hemisphere_distance(x0) > r {
                continue;
            }
            if e.word_len + 1 > limits.max_word_len {
                let partial = WordBall { elements: elems, completeness: Completeness::Incomplete, warnings: vec![], radius: r };
                return Err(GroupError::BudgetExceeded { reason: "word length cap", partial: Box::new(partial) });
            }
            let h = e.g * g.letters[l];
            let disp = hyp_dist(x0, &h.apply_point(x0)).unwrap_or(f64::INFINITY);
            let id = elems.len();
            elems.push(BallElement { g: h, disp, word_len: e.word_len + 1, parent: i as u32, letter: l as u16 });
            children.push((id, Some(disc)));
            if elems.len() > limits.max_elements {
                let partial = WordBall { elements: elems, completeness: Completeness::Incomplete, warnings: vec![], radius: r };
                return Err(GroupError::BudgetExceeded { reason: "element cap", partial: Box::new(partial) });
            }
        }
        children.reverse();
        stack.extend(children);
    }
    let kept = filter_ball(elems, r);
    Ok(WordBall { elements: kept, completeness: Completeness::Complete, warnings: vec![], radius: r })
}

/// Keeps the elements within `r`, re-linking parents to the nearest kept
/// ancestor's word by storing words through retained intermediate nodes.
fn filter_ball(elems: Vec<BallElement>, r: f64) -> Vec<BallElement> {
    // Words are stored as parent chains, so dropped intermediate nodes must
    // be kept as long as a descendant is kept. Mark kept nodes and their
    // ancestors, then compact.
    let n = elems.len();
    let mut keep = vec![false; n];
    keep[0] = true;
    for i in (1..n).rev() {
        if elems[i].disp <= r || keep[i] {
            keep[i] = true;
            keep[elems[i].parent as usize] = true;
        }
    }
    let mut map = vec![u32::MAX; n];
    let mut out = Vec::new();
    for i in 0..n {
        if keep[i] {
            map[i] = out.len() as u32;
            let mut e = elems[i];
            e.parent = map[e.parent as usize];
            out.push(e);
        }
    }
    out
}

fn bfs_ball<E: Executor>(g: &GroupSpec, x0: &Point, r: f64, limits: &BallLimits, exec: &E) -> Result<WordBall, GroupError> {
    let mut elems = vec![root(g.dim)];
    let mut dedup = Dedup::new();
    dedup.insert(&elems[0].g, 0);
    let mut warnings = Vec::new();
    let mut frontier = vec![0usize];
    let mut empty = 0;
    let mut safety_done = false;
    let reach = r + limits.prune_slack;
    let mut len = 0u32;
    let completeness = loop {
        if frontier.is_empty() {
            break Completeness::Heuristic;
        }
        len += 1;
        if len > limits.max_word_len {
            let partial = WordBall { elements: filter_ball(elems, r), completeness: Completeness::Incomplete, warnings, radius: r };
            return Err(GroupError::BudgetExceeded { reason: "word length cap", partial: Box::new(partial) });
        }
        let cands: Vec<Vec<(u16, Isometry, f64)>> = exec.map(&frontier, |&i| {
            let base = elems[i].g;
            g.letters
                .iter()
                .enumerate()
                .filter_map(|(l, s)| {
                    let h = base * *s;
                    let d = hyp_dist(x0, &h.apply_point(x0)).unwrap_or(f64::INFINITY);
                    (d <= reach).then_some((l as u16, h, d))
                })
                .collect()
        });
        let mut next = Vec::new();
        let mut within = 0usize;
        for (&i, cs) in frontier.iter().zip(cands) {
            for (l, h, d) in cs {
                match dedup.lookup(&h, &elems) {
                    Lookup::Found => continue,
                    Lookup::Near(id, dist) => warnings.push(NearCollision { first: id, second: elems.len(), distance: dist }),
                    Lookup::New => {}
                }
                let id = elems.len();
                dedup.insert(&h, id);
                elems.push(BallElement { g: h, disp: d, word_len: len, parent: i as u32, letter: l });
                next.push(id);
                if d <= r {
                    within += 1;
                }
            }
        }
        if elems.len() > limits.max_elements {
            let partial = WordBall { elements: filter_ball(elems, r), completeness: Completeness::Incomplete, warnings, radius: r };
            return Err(GroupError::BudgetExceeded { reason: "element cap", partial: Box::new(partial) });
        }
        frontier = next;
        if within == 0 {
            empty += 1;
        } else {
            empty = 0;
            safety_done = false;
        }
        if empty >= 2 {
            if safety_done {
                break Completeness::Heuristic;
            }
            safety_done = true;
            empty = 1;
        }
    };
    Ok(WordBall { elements: filter_ball(elems, r), completeness, warnings, radius: r })
}

/// Elements of the word ball of length `word_bound` preserving `d` setwise,
/// re-verified by body equality. The flag is set when the last shell still
/// produced new stabilizer elements, i.e. the list may be incomplete.
pub fn detect_setwise_stabilizer(g: &GroupSpec, d: &ConvexBody, word_bound: u32) -> Result<(Vec<(Isometry, Vec<u16>)>, bool), GroupError> {
    if d.dim() != g.dim {
        return Err(GroupError::DimensionMismatch);
    }
    let ball = enumerate_word_ball(g, word_bound.max(1), 10_000_000)?;
    let mut out = Vec::new();
    let mut last_shell = false;
    for (i, e) in ball.elements.iter().enumerate() {
        if d.apply(&e.g).approx_eq(d, 1e-9) {
            out.push((e.g, ball.word(i)));
            if e.word_len == word_bound && i != 0 {
                last_shell = true;
            }
        }
    }
    Ok((out, last_shell))
}

/// Moves `z` into `{|Re z| ≤ 1/2, |z| ≥ 1}` and returns the isometry used.
pub fn reduce_to_fundamental_domain(g: &GroupSpec, z: &Point) -> Result<(Point, Isometry), GroupError> {
    if g.kind != GroupKind::Modular {
        return Err(GroupError::NotModular);
    }
    if z.dim != Dim::Two {
        return Err(GroupError::DimensionMismatch);
    }
    let s = Isometry::real(0.0, -1.0, 1.0, 0.0).expect("unimodular");
    let mut m = Isometry::identity(Dim::Two);
    let mut p = *z;
    for _ in 0..10_000 {
        let n = p.z.re.round();
        if n != 0.0 && p.z.re.abs() > 0.5 {
            let t = Isometry::real(1.0, -n, 0.0, 1.0).expect("unimodular");
            p = t.apply_point(&p);
            m = t * m;
        }
        if p.z.norm_sqr() + p.h * p.h < 1.0 - 1e-15 {
            p = s.apply_point(&p);
            m = s * m;
        } else {
            break;
        }
    }
    Ok((p, m))
}

/// Estimated critical exponent with its confidence half-width.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentEstimate {
    pub delta_hat: f64,
    pub confidence_halfwidth: f64,
    pub radii_used: Vec<f64>,
    pub completeness: Completeness,
}

/// Least-squares slope of `log y` against `x` with twice its standard error.
pub(crate) fn log_slope(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = x.iter().zip(&ly).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let se = if n > 2.0 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, icpt, 2.0 * se)
}

/// Annulus sums `Σ_{n−1 < d(x0, γx0) ≤ n} e^{∫F}` over the ball.
pub fn annulus_sums(ball: &WordBall, x0: &Point, f: &Potential, r_max: f64) -> Vec<f64> {
    let n = r_max.floor() as usize;
    let mut sums = vec![0.0; n];
    for e in &ball.elements {
        if e.disp <= 0.0 || e.disp > n as f64 {
            continue;
        }
        let k = (e.disp.ceil() as usize).max(1) - 1;
        let w = match f {
            Potential::Zero => 1.0,
            Potential::Constant(s) => (s * e.disp).exp(),
            Potential::Custom { .. } => {
                let v = UnitTangent::towards(x0, &e.g.apply_point(x0)).expect("distinct points");
                potential_integral(f, &v, e.disp).exp()
            }
        };
        sums[k] += w;
    }
    sums
}

/// Slope of the log annulus sums over the last half of the unit annuli.
pub fn estimate_critical_exponent<E: Executor>(
    g: &GroupSpec,
    x0: &Point,
    f: &Potential,
    r_max: f64,
    limits: &BallLimits,
    exec: &E,
) -> Result<ExponentEstimate, GroupError> {
    let ball = enumerate_displacement_ball(g, x0, r_max, limits, exec)?;
    exponent_from_ball(&ball, x0, f, r_max)
}

pub fn exponent_from_ball(ball: &WordBall, x0: &Point, f: &Potential, r_max: f64) -> Result<ExponentEstimate, GroupError> {
    let sums = annulus_sums(ball, x0, f, r_max);
    if sums.iter().filter(|s| **s > 0.0).count() < 5 {
        return Err(GroupError::InsufficientData("fewer than five nonempty annuli"));
    }
    let start = sums.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = sums
        .iter()
        .enumerate()
        .skip(start)
        .filter(|(_, s)| **s > 0.0)
        .map(|(k, s)| ((k + 1) as f64, *s))
        .unzip();
    if xs.len() < 3 {
        return Err(GroupError::InsufficientData("fewer than three nonempty annuli in the fitted range"));
    }
    let (slope, _, hw) = log_slope(&xs, &ys);
    Ok(ExponentEstimate { delta_hat: slope, confidence_halfwidth: hw, radii_used: xs, completeness: ball.completeness })
}
