//! Orbit pieces of Schottky limit sets: enumeration by nested discs,
//! diameter counts and raster output.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use num_traits::Float;
use thiserror::Error;

use crate::exec::Executor;
use crate::geom::{BoundaryPoint, Isometry};
use crate::groups::{log_slope, Circle, GroupSpec};

pub const DEPTH_CAP: usize = 64;
pub const MAX_RESOLUTION: usize = 4096;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LimitError {
    #[error("group is not a Schottky group")]
    NotSchottky,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("depth cap {DEPTH_CAP} reached")]
    DepthCap { partial: Vec<LimitPiece> },
    #[error("insufficient range: {0}")]
    InsufficientRange(&'static str),
}

/// The subgroup whose limit set is translated around: the cyclic group of
/// one letter, whose limit set is its two fixed points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceBase {
    Axis { letter: u16 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitPiece {
    /// Reduced word of the coset representative; empty for the base piece.
    pub word: Vec<u16>,
    /// Disc containing the piece and every piece below it in the word tree.
    pub disc: Circle,
    pub diameter: f64,
    /// Endpoints of the translated axis.
    pub endpoints: [C64; 2],
}

/// Fixed points of a loxodromic Möbius map with `c ≠ 0`.
pub fn fixed_points(g: &Isometry) -> Result<[C64; 2], LimitError> {
    let [a, b, c, d] = g.entries();
    if c.norm() <= 1e-300 {
        return Err(LimitError::InvalidArgument("letter fixes infinity"));
    }
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    let two_c = 2.0 * c;
    Ok([(a - d + disc) / two_c, (a - d - disc) / two_c])
}

fn mobius(g: &Isometry, z: C64) -> C64 {
    match g.apply_boundary(&BoundaryPoint::Finite(z)) {
        BoundaryPoint::Finite(w) => w,
        BoundaryPoint::Infinity => C64::new(f64::INFINITY, 0.0),
    }
}

/// Smallest disc centred at the origin containing every letter disc.
pub fn root_disc(g: &GroupSpec) -> Circle {
    let r = g.letter_discs().iter().map(|c| c.center.norm() + c.radius).fold(0.0, f64::max);
    Circle::new(C64::new(0.0, 0.0), r)
}

/// Uniform bound on `|l'(z)|` for a letter `l` on every letter disc other
/// than that of `l⁻¹`.
pub fn contraction_bound(g: &GroupSpec) -> f64 {
    let discs = g.letter_discs();
    let mut lam: f64 = 0.0;
    for (i, l) in g.letters().iter().enumerate() {
        let inv = g.inverse_letter(i);
        let pole = -l.d / l.c;
        for (j, dj) in discs.iter().enumerate() {
            if j == inv {
                continue;
            }
            let gap = (pole - dj.center).norm() - dj.radius;
            lam = lam.max(1.0 / (l.c.norm_sqr() * gap * gap));
        }
    }
    lam
}

/// Smallest word length beyond which every image disc has diameter below
/// `threshold`, from `diam ≤ 2 r λ^{k−1}`.
pub fn depth_bound(g: &GroupSpec, threshold: f64) -> Option<usize> {
    let lam = contraction_bound(g);
    if !(lam < 1.0) || !(threshold > 0.0) {
        return None;
    }
    let r = g.letter_discs().iter().map(|c| c.radius).fold(0.0, f64::max);
    let mut k = 1usize;
    let mut d = 2.0 * r;
    while d >= threshold {
        d *= lam;
        k += 1;
    }
    Some(k)
}

struct Node {
    word: Vec<u16>,
    /// Matrix of the word without its last letter.
    prefix: Isometry,
    disc: Circle,
}

fn check(g: &GroupSpec, base: PieceBase, threshold: f64) -> Result<[C64; 2], LimitError> {
    if !g.is_schottky() {
        return Err(LimitError::NotSchottky);
    }
    if !(threshold > 0.0) {
        return Err(LimitError::InvalidArgument("threshold must be positive"));
    }
    let PieceBase::Axis { letter } = base;
    let l = g.letters().get(letter as usize).ok_or(LimitError::InvalidArgument("letter out of range"))?;
    fixed_points(l)
}

fn piece(g: &GroupSpec, base: PieceBase, ends: &[C64; 2], node: &Node) -> Option<LimitPiece> {
    let PieceBase::Axis { letter } = base;
    let last = *node.word.last()?;
    if last == letter || last as usize == g.inverse_letter(letter as usize) {
        return None;
    }
    let full = (node.prefix * g.letters()[last as usize]).renormalized();
    let e = [mobius(&full, ends[0]), mobius(&full, ends[1])];
    Some(LimitPiece { word: node.word.clone(), disc: node.disc, diameter: (e[0] - e[1]).norm(), endpoints: e })
}

fn children<'a>(g: &'a GroupSpec, node: &Node) -> impl Iterator<Item = Node> + 'a {
    let prefix = match node.word.last() {
        Some(&l) => (node.prefix * g.letters()[l as usize]).renormalized(),
        None => node.prefix,
    };
    let forbidden = node.word.last().map(|&l| g.inverse_letter(l as usize));
    let word = node.word.clone();
    (0..g.letters().len()).filter(move |&i| Some(i) != forbidden).map(move |i| {
        let mut w = word.clone();
        w.push(i as u16);
        Node { word: w, prefix, disc: g.letter_discs()[i].image(&prefix) }
    })
}

fn base_piece(g: &GroupSpec, ends: &[C64; 2]) -> LimitPiece {
    LimitPiece { word: Vec::new(), disc: root_disc(g), diameter: (ends[0] - ends[1]).norm(), endpoints: *ends }
}

/// Depth-first search below `root`, pruning at discs of diameter below
/// `threshold`. Returns pieces in preorder and whether the cap was hit.
fn search(g: &GroupSpec, base: PieceBase, ends: &[C64; 2], root: Node, threshold: f64) -> (Vec<LimitPiece>, bool) {
    let mut out = Vec::new();
    let mut capped = false;
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        if 2.0 * node.disc.radius < threshold {
            continue;
        }
        if let Some(p) = piece(g, base, ends, &node) {
            if p.diameter >= threshold {
                out.push(p);
            }
        }
        if node.word.len() >= DEPTH_CAP {
            capped = true;
            continue;
        }
        let mut kids: Vec<Node> = children(g, &node).collect();
        kids.reverse();
        stack.extend(kids);
    }
    (out, capped)
}

/// All translates `γΛΓ₀`, one per coset `γΓ₀`, with diameter at least
/// `threshold`. The base piece is always first.
pub fn orbit_pieces<E: Executor>(
    g: &GroupSpec,
    base: PieceBase,
    threshold: f64,
    exec: &E,
) -> Result<Vec<LimitPiece>, LimitError> {
    let ends = check(g, base, threshold)?;
    let root = Node { word: Vec::new(), prefix: Isometry::identity(g.dim), disc: root_disc(g) };
    let tops: Vec<Node> = children(g, &root).collect();
    let parts = exec.map(&tops, |n| {
        let n = Node { word: n.word.clone(), prefix: n.prefix, disc: n.disc };
        search(g, base, &ends, n, threshold)
    });
    let mut out = vec![base_piece(g, &ends)];
    let mut capped = false;
    for (p, c) in parts {
        out.extend(p);
        capped |= c;
    }
    if capped {
        return Err(LimitError::DepthCap { partial: out });
    }
    Ok(out)
}

/// Every reduced word up to `depth` without pruning; the base piece first,
/// then pieces of diameter at least `threshold` in preorder.
pub fn exhaustive_pieces(g: &GroupSpec, base: PieceBase, threshold: f64, depth: usize) -> Result<Vec<LimitPiece>, LimitError> {
    let ends = check(g, base, threshold)?;
    let mut out = vec![base_piece(g, &ends)];
    let mut stack = vec![Node { word: Vec::new(), prefix: Isometry::identity(g.dim), disc: root_disc(g) }];
    while let Some(node) = stack.pop() {
        if let Some(p) = piece(g, base, &ends, &node) {
            if p.diameter >= threshold {
                out.push(p);
            }
        }
        if node.word.len() < depth {
            let mut kids: Vec<Node> = children(g, &node).collect();
            kids.reverse();
            stack.extend(kids);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiameterReport {
    pub t_grid: Vec<f64>,
    pub counts: Vec<u64>,
    pub log_c: f64,
    pub delta_hat: f64,
    /// Twice the standard error of the slope.
    pub delta_halfwidth: f64,
}

/// Counts `#{pieces : diameter ≥ 1/T}` on the grid and the power-law fit
/// of `log count` against `log T`. `t_enumerated` is `1/threshold` of the
/// enumeration the pieces came from.
pub fn diameter_counts(pieces: &[LimitPiece], t_grid: &[f64], t_enumerated: f64) -> Result<DiameterReport, LimitError> {
    if t_grid.iter().any(|t| !(*t > 0.0) || *t > t_enumerated * (1.0 + 1e-12)) {
        return Err(LimitError::InsufficientRange("grid point beyond enumerated range"));
    }
    let mut d: Vec<f64> = pieces.iter().map(|p| p.diameter).collect();
    d.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    let counts: Vec<u64> = t_grid.iter().map(|t| d.partition_point(|x| *x >= 1.0 / t) as u64).collect();
    let (x, y): (Vec<f64>, Vec<f64>) =
        t_grid.iter().zip(&counts).filter(|(_, c)| **c > 0).map(|(t, c)| (t.ln(), *c as f64)).unzip();
    if x.len() < 4 {
        return Err(LimitError::InsufficientRange("fewer than four grid points with pieces"));
    }
    let (delta_hat, log_c, hw) = log_slope(&x, &y);
    Ok(DiameterReport { t_grid: t_grid.to_vec(), counts, log_c, delta_hat, delta_halfwidth: hw })
}

/// Square viewing window in the boundary plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub center: C64,
    pub half_width: f64,
}

impl Window {
    /// Bounding square of all discs, enlarged by five percent.
    pub fn fit(pieces: &[LimitPiece]) -> Window {
        if pieces.is_empty() {
            return Window { center: C64::new(0.0, 0.0), half_width: 1.0 };
        }
        let (mut lo, mut hi) = (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in pieces {
            let (c, r) = (p.disc.center, p.disc.radius);
            lo = C64::new(lo.re.min(c.re - r), lo.im.min(c.im - r));
            hi = C64::new(hi.re.max(c.re + r), hi.im.max(c.im + r));
        }
        let half = 0.5 * (hi.re - lo.re).max(hi.im - lo.im) * 1.05;
        Window { center: (lo + hi) * 0.5, half_width: half.max(1e-300) }
    }
}

/// Binary P6 image of the discs, darker with word length, on white.
pub fn render_ppm(pieces: &[LimitPiece], resolution: usize, window: &Window) -> Result<Vec<u8>, LimitError> {
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(LimitError::InvalidArgument("resolution must lie in 1..=4096"));
    }
    let header = format!("P6\n{resolution} {resolution}\n255\n");
    let mut img = vec![255u8; 3 * resolution * resolution];
    let px = 2.0 * window.half_width / resolution as f64;
    let x0 = window.center.re - window.half_width;
    let y1 = window.center.im + window.half_width;
    let mut order: Vec<&LimitPiece> = pieces.iter().collect();
    order.sort_by_key(|p| p.word.len());
    for p in order {
        let shade = 200u8.saturating_sub((p.word.len() as u8).saturating_mul(40));
        let (c, r) = (p.disc.center, p.disc.radius);
        let col = |x: f64| ((x - x0) / px).floor();
        let row = |y: f64| ((y1 - y) / px).floor();
        let (c0, c1) = (col(c.re - r).max(0.0) as usize, (col(c.re + r).min(resolution as f64 - 1.0)).max(-1.0));
        let (r0, r1) = (row(c.im + r).max(0.0) as usize, (row(c.im - r).min(resolution as f64 - 1.0)).max(-1.0));
        if c1 < 0.0 || r1 < 0.0 {
            continue;
        }
        for i in r0..=r1 as usize {
            let y = y1 - (i as f64 + 0.5) * px;
            for j in c0..=c1 as usize {
                let x = x0 + (j as f64 + 0.5) * px;
                if (C64::new(x, y) - c).norm_sqr() <= r * r {
                    let k = 3 * (i * resolution + j);
                    img[k..k + 3].copy_from_slice(&[shade, shade, shade]);
                }
            }
        }
    }
    let mut out = header.into_bytes();
    out.extend(img);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::groups::preset_schottky_symmetric;

    #[test]
    fn fixed_points_are_fixed() {
        let g = preset_schottky_symmetric(3.0, 1.0).unwrap();
        for l in g.letters() {
            for z in fixed_points(l).unwrap() {
                assert!((mobius(l, z) - z).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn large_threshold_gives_base_only() {
        let g = preset_schottky_symmetric(3.0, 1.0).unwrap();
        let p = orbit_pieces(&g, PieceBase::Axis { letter: 0 }, 100.0, &Sequential).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p[0].word.is_empty());
    }

    #[test]
    fn blank_image() {
        let b = render_ppm(&[], 4, &Window::fit(&[])).unwrap();
        assert!(b.starts_with(b"P6\n4 4\n255\n"));
        assert!(b[11..].iter().all(|x| *x == 255));
    }
}
