//! The subcommands. Each reads what it needs from the config, writes its
//! files into the output directory and returns a one-line summary.

use orthocount_core::asym::{self, FamilyData, ManifoldData, Prediction};
use orthocount_core::exec::Executor;
use orthocount_core::geom::{BoundaryPoint, ConvexBody, Dim, Isometry, Point};
use orthocount_core::groups::{self, BallLimits, GroupError, GroupKind, GroupSpec};
use orthocount_core::limitset::{self, PieceBase, Window};
use orthocount_core::perp::{self, EngineOptions, EquivariantFamily, OrthoSpectrum, PerpError, Potential};
use orthocount_core::stats::{self, CountReport, PairSample};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, FamilyConfig, GroupConfig, PotentialConfig};
use crate::error::CliError;
use crate::output::{self, num, OutDir};
use crate::selftest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Constants,
    Spectrum,
    Count,
    Equidist,
    Limitset,
    Selftest,
}

pub fn run<E: Executor>(cmd: Command, cfg: &ExperimentConfig, out: &OutDir, exec: &E) -> Result<String, CliError> {
    match cmd {
        Command::Constants => constants(cfg, out),
        Command::Spectrum => spectrum(cfg, out, exec),
        Command::Count => count(cfg, out, exec),
        Command::Equidist => equidist(cfg, out, exec),
        Command::Limitset => limit_set(cfg, out, exec),
        Command::Selftest => self_test(cfg, out, exec),
    }
}

fn missing(section: &str) -> CliError {
    CliError::Config { key: Some(section.into()), message: format!("section [{section}] is required by this command"), line: None, column: None }
}

fn keyed(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config { key: Some(key.into()), message: message.into(), line: None, column: None }
}

fn matrix(m: &[f64; 4], key: &str) -> Result<Isometry, CliError> {
    Isometry::real(m[0], m[1], m[2], m[3]).map_err(|e| keyed(key, format!("matrix {m:?}: {e}")))
}

pub fn build_group(cfg: &ExperimentConfig) -> Result<GroupSpec, CliError> {
    match &cfg.group {
        GroupConfig::Modular => Ok(groups::preset_modular()),
        GroupConfig::SchottkySymmetric { center, radius } => {
            groups::preset_schottky_symmetric(*center, *radius).map_err(|e| keyed("group", e.to_string()))
        }
        GroupConfig::Matrices { generators } => {
            let gens = generators.iter().map(|m| matrix(m, "generators")).collect::<Result<Vec<_>, _>>()?;
            GroupSpec::custom(Dim::Two, gens, "matrices").map_err(|e| keyed("generators", e.to_string()))
        }
    }
}

pub fn build_family(g: &GroupSpec, fc: &FamilyConfig, section: &str) -> Result<EquivariantFamily, CliError> {
    if g.dim != Dim::Two {
        return Err(keyed(section, "families are planar; this group acts on hyperbolic 3-space"));
    }
    let fam = match fc {
        FamilyConfig::Cusp { level, period } => {
            let base = ConvexBody::horoball(Dim::Two, BoundaryPoint::Infinity, *level).map_err(|e| keyed("level", e.to_string()))?;
            let t = matrix(&[1.0, *period, 0.0, 1.0], "period")?;
            EquivariantFamily::new(base, vec![t], section)
        }
        FamilyConfig::Axis { matrix: m, extra } => {
            let extra = extra.iter().map(|x| matrix(x, "extra")).collect::<Result<Vec<_>, _>>()?;
            EquivariantFamily::axis(&matrix(m, "matrix")?, extra, section)
        }
        FamilyConfig::Point { x, y, stabilizer } => {
            let stab = stabilizer.iter().map(|x| matrix(x, "stabilizer")).collect::<Result<Vec<_>, _>>()?;
            EquivariantFamily::point(Point::h2(*x, *y), stab, section)
        }
    };
    fam.map_err(|e| keyed(section, e.to_string()))
}

/// Quotient data of a configured family.
pub fn family_data(fc: &FamilyConfig, fam: &EquivariantFamily) -> FamilyData {
    match fc {
        FamilyConfig::Cusp { level, period } => FamilyData::Cusp { vol: asym::cusp_volume(2, *period, *level) },
        FamilyConfig::Axis { matrix: m, extra } => {
            let tr = (m[0] + m[3]).abs();
            let mut length = 2.0 * (tr / 2.0).acosh();
            let ends = fam.base.ideal_points();
            // An extra symmetry exchanging the endpoints folds the closed
            // geodesic in half.
            let swaps = extra.iter().filter_map(|x| Isometry::real(x[0], x[1], x[2], x[3]).ok()).any(|e| {
                ends.len() == 2 && e.apply_boundary(&ends[0]).approx_eq(&ends[1], 1e-8)
            });
            if swaps {
                length /= 2.0;
            }
            FamilyData::Geodesic { length, m: 1 }
        }
        FamilyConfig::Point { .. } => FamilyData::Point { isotropy: fam.stabilizer_order_of(&fam.base) as u32 },
    }
}

fn manifold(cfg: &ExperimentConfig) -> Result<ManifoldData, CliError> {
    match cfg.group {
        GroupConfig::Modular => Ok(ManifoldData::modular()),
        _ => Err(keyed("preset", "closed-form constants need a lattice of known covolume; only the modular group qualifies")),
    }
}

fn potential(cfg: &ExperimentConfig) -> Potential {
    match cfg.potential {
        PotentialConfig::Zero => Potential::Zero,
        PotentialConfig::Constant { sigma } => Potential::Constant(sigma),
    }
}

fn engine_options(cfg: &ExperimentConfig) -> EngineOptions {
    let d = EngineOptions::default();
    let e = cfg.engine.clone();
    EngineOptions {
        margin: e.as_ref().and_then(|e| e.margin).unwrap_or(d.margin),
        max_bodies: e.as_ref().and_then(|e| e.max_bodies).unwrap_or(d.max_bodies),
        potential: potential(cfg),
        ..d
    }
}

struct Pair {
    g: GroupSpec,
    fm: EquivariantFamily,
    fp: EquivariantFamily,
}

fn pair(cfg: &ExperimentConfig) -> Result<Pair, CliError> {
    let g = build_group(cfg)?;
    let fm = build_family(&g, cfg.minus.as_ref().ok_or_else(|| missing("minus"))?, "minus")?;
    let fp = build_family(&g, cfg.plus.as_ref().ok_or_else(|| missing("plus"))?, "plus")?;
    Ok(Pair { g, fm, fp })
}

fn prediction(cfg: &ExperimentConfig, p: &Pair) -> Result<Prediction, CliError> {
    let m = manifold(cfg)?;
    let am = family_data(cfg.minus.as_ref().expect("checked"), &p.fm);
    let ap = family_data(cfg.plus.as_ref().expect("checked"), &p.fp);
    asym::pair_constant(&m, &am, &ap).map_err(|e| CliError::Compute(e.to_string()))
}

fn prediction_json(p: &Prediction) -> Value {
    json!({
        "c": p.c,
        "delta": p.delta,
        "formula_id": p.formula_id,
        "composition": p.composition,
        "audit_passed": p.audit_passed,
    })
}

fn family_json(d: &FamilyData) -> Value {
    match *d {
        FamilyData::Point { isotropy } => json!({ "kind": "point", "isotropy": isotropy }),
        FamilyData::Cusp { vol } => json!({ "kind": "cusp", "vol": vol }),
        FamilyData::Geodesic { length, m } => json!({ "kind": "geodesic", "length": length, "m": m }),
    }
}

fn constants(cfg: &ExperimentConfig, out: &OutDir) -> Result<String, CliError> {
    let p = pair(cfg)?;
    let m = manifold(cfg)?;
    let pred = prediction(cfg, &p)?;
    let am = family_data(cfg.minus.as_ref().expect("checked"), &p.fm);
    let ap = family_data(cfg.plus.as_ref().expect("checked"), &p.fp);
    let f = potential(cfg);
    let delta_f = asym::weighted_exponent(&pred, &f).map_err(|e| CliError::Compute(e.to_string()))?;
    let doc = json!({
        "command": "constants",
        "prediction": prediction_json(&pred),
        "delta_f": delta_f,
        "manifold": { "n": m.n, "vol": m.vol_m },
        "bowen_margulis_mass": asym::bowen_margulis_mass(&m),
        "minus": family_json(&am),
        "plus": family_json(&ap),
        "skinning_mass": { "minus": asym::skinning_mass(&m, &am), "plus": asym::skinning_mass(&m, &ap) },
        "provenance": output::provenance(cfg, &[("constants", "exact")]),
    });
    out.write_json("constants.json", &doc)?;
    if !pred.audit_passed {
        return Err(CliError::Compute(format!("composition audit failed: c = {} but masses give {}", pred.c, pred.composition)));
    }
    Ok(format!("c = {} delta = {} formula = {} audit_passed = true", num(pred.c), pred.delta, pred.formula_id))
}

/// Runs the engine; on a budget overrun the partial spectrum is written
/// before the error is returned.
fn enumerate<E: Executor>(cfg: &ExperimentConfig, p: &Pair, t_max: f64, out: &OutDir, exec: &E) -> Result<OrthoSpectrum, CliError> {
    match perp::find_common_perpendiculars_with(&p.fm, &p.fp, &p.g, t_max, &engine_options(cfg), exec) {
        Ok(s) => Ok(s),
        Err(PerpError::BudgetExceeded { reason, partial }) => {
            write_spectrum(cfg, &partial, &p.g, out, "budget-exceeded")?;
            Err(CliError::Compute(format!("budget exceeded ({reason}); partial spectrum written")))
        }
        Err(e @ (PerpError::InvalidFamily(_) | PerpError::DimensionMismatch)) => Err(keyed("minus", e.to_string())),
        Err(e) => Err(CliError::Compute(e.to_string())),
    }
}

fn write_spectrum(cfg: &ExperimentConfig, s: &OrthoSpectrum, g: &GroupSpec, out: &OutDir, status: &str) -> Result<(), CliError> {
    out.write("spectrum.csv", output::spectrum_csv(s, g).as_bytes())?;
    let doc = json!({
        "command": "spectrum",
        "t_max": s.t_max,
        "records": s.records.len(),
        "total_multiplicity": s.records.iter().map(|r| r.multiplicity.value()).sum::<f64>(),
        "tangencies": s.tangencies,
        "bodies_visited": s.bodies_visited,
        "provenance": output::provenance(cfg, &[("enumeration", s.completeness.as_str()), ("run", status)]),
    });
    out.write_json("spectrum.json", &doc)?;
    Ok(())
}

fn count_range(cfg: &ExperimentConfig) -> Result<(f64, Vec<f64>), CliError> {
    let c = cfg.count.as_ref().ok_or_else(|| missing("count"))?;
    let grid = if c.t_grid.is_empty() { (1..=24).map(|k| c.t_max * (0.5 + k as f64 / 48.0)).collect() } else { c.t_grid.clone() };
    Ok((c.t_max, grid))
}

fn spectrum<E: Executor>(cfg: &ExperimentConfig, out: &OutDir, exec: &E) -> Result<String, CliError> {
    let p = pair(cfg)?;
    let (t_max, _) = count_range(cfg)?;
    let s = enumerate(cfg, &p, t_max, out, exec)?;
    write_spectrum(cfg, &s, &p.g, out, "complete")?;
    Ok(format!("{} perpendiculars up to length {} ({})", s.records.len(), t_max, s.completeness.as_str()))
}

fn count<E: Executor>(cfg: &ExperimentConfig, out: &OutDir, exec: &E) -> Result<String, CliError> {
    let p = pair(cfg)?;
    let (t_max, grid) = count_range(cfg)?;
    let s = enumerate(cfg, &p, t_max, out, exec)?;
    let f = potential(cfg);
    let n: Vec<f64> = perp::counting_function(&s, &f, &grid).map_err(|e| CliError::Compute(e.to_string()))?.into_iter().map(|x| x.1).collect();
    let pred = match cfg.group {
        GroupConfig::Modular => Some(prediction(cfg, &p)?),
        _ => None,
    };
    let mut doc = json!({
        "command": "count",
        "t_max": t_max,
        "records": s.records.len(),
        "provenance": output::provenance(cfg, &[("enumeration", s.completeness.as_str())]),
    });
    let summary;
    if let Some(pred) = &pred {
        let pv = grid.iter().map(|t| asym::predicted_count(pred, *t, &f)).collect::<Result<Vec<_>, _>>().map_err(|e| CliError::Compute(e.to_string()))?;
        let rep = CountReport::new(grid.clone(), n.clone(), pv.clone()).map_err(|e| CliError::Compute(e.to_string()))?;
        let rows: Vec<Vec<f64>> = (0..grid.len()).map(|i| vec![grid[i], n[i], pv[i], rep.ratios[i]]).collect();
        out.write("count.csv", output::table_csv(&["t", "count", "prediction", "ratio"], &rows).as_bytes())?;
        doc["prediction"] = prediction_json(pred);
        doc["t_grid"] = json!(grid);
        doc["counts"] = json!(n);
        doc["predictions"] = json!(pv);
        doc["ratios"] = json!(rep.ratios);
        doc["fit"] = json!(rep.fitted.map(|f| json!({ "log_c": f.log_c, "delta": f.delta, "residual": f.residual })));
        doc["kappa_hat"] = json!(rep.fitted_kappa);
        summary = format!("N({}) = {} ratio = {}", num(t_max), num(*n.last().unwrap_or(&0.0)), num(*rep.ratios.last().unwrap_or(&f64::NAN)));
    } else {
        let rows: Vec<Vec<f64>> = (0..grid.len()).map(|i| vec![grid[i], n[i]]).collect();
        out.write("count.csv", output::table_csv(&["t", "count"], &rows).as_bytes())?;
        let pos: Vec<usize> = (0..n.len()).filter(|&i| n[i] > 0.0).collect();
        let fit = stats::exponential_fit(&pos.iter().map(|&i| grid[i]).collect::<Vec<_>>(), &pos.iter().map(|&i| n[i]).collect::<Vec<_>>()).ok();
        doc["t_grid"] = json!(grid);
        doc["counts"] = json!(n);
        doc["fit"] = json!(fit.map(|f| json!({ "log_c": f.log_c, "delta": f.delta, "residual": f.residual })));
        summary = format!("N({}) = {}", num(t_max), num(*n.last().unwrap_or(&0.0)));
    }
    out.write_json("count.json", &doc)?;
    Ok(summary)
}

fn equidist<E: Executor>(cfg: &ExperimentConfig, out: &OutDir, exec: &E) -> Result<String, CliError> {
    let e = cfg.equidist.clone().ok_or_else(|| missing("equidist"))?;
    let p = pair(cfg)?;
    let s = enumerate(cfg, &p, e.t_max, out, exec)?;
    let w: Vec<f64> = s.records.iter().map(|r| r.weight * r.multiplicity.value()).collect();
    let feet_m: Vec<f64> = s.records.iter().map(|r| r.foot_minus_datum[0]).collect();
    let feet_p: Vec<f64> = s.records.iter().map(|r| r.foot_plus_datum[0]).collect();
    let ks_m = stats::ks_uniform_weighted(&feet_m, &w).map_err(|e| CliError::Compute(e.to_string()))?;
    let ks_p = stats::ks_uniform_weighted(&feet_p, &w).map_err(|e| CliError::Compute(e.to_string()))?;
    let pc = stats::pair_product_check(&PairSample::from_spectrum(&s), e.bins, e.bins).map_err(|e| CliError::Compute(e.to_string()))?;
    let rows: Vec<Vec<f64>> = (0..e.bins * e.bins).map(|k| vec![(k / e.bins) as f64, (k % e.bins) as f64, pc.histogram[k]]).collect();
    out.write("pairs.csv", output::table_csv(&["bin_minus", "bin_plus", "mass"], &rows).as_bytes())?;
    let mut push = Vec::new();
    let mut push_rows = Vec::new();
    for (k, &t) in e.flow_times.iter().enumerate() {
        let r = stats::flow_pushforward_check(&p.fm, &p.g, t, e.samples, cfg.seed, exec).map_err(|err| match err {
            stats::StatsError::NotModular => keyed("flow_times", "the pushforward check needs the modular group with the standard cusp as minus family"),
            other => CliError::Compute(other.to_string()),
        })?;
        for (c, (a, b)) in r.empirical.iter().zip(&r.expected).enumerate() {
            push_rows.push(vec![t, c as f64, *a, *b]);
        }
        push.push(json!({ "t": t, "divergence": r.divergence, "index": k }));
    }
    if !push_rows.is_empty() {
        out.write("pushforward.csv", output::table_csv(&["t", "cell", "empirical", "expected"], &push_rows).as_bytes())?;
    }
    let doc = json!({
        "command": "equidist",
        "t_max": e.t_max,
        "records": s.records.len(),
        "ks_minus": ks_m,
        "ks_plus": ks_p,
        "pair_divergence": pc.divergence,
        "pair_empty_bins": pc.empty_bins,
        "bins": e.bins,
        "pushforward": push,
        "provenance": output::provenance(cfg, &[("enumeration", s.completeness.as_str())]),
    });
    out.write_json("equidist.json", &doc)?;
    Ok(format!("ks_minus = {} pair_divergence = {}", num(ks_m), num(pc.divergence)))
}

fn limit_set<E: Executor>(cfg: &ExperimentConfig, out: &OutDir, exec: &E) -> Result<String, CliError> {
    let l = cfg.limitset.clone().ok_or_else(|| missing("limitset"))?;
    let g = build_group(cfg)?;
    if !matches!(g.kind, GroupKind::Schottky(_)) {
        return Err(keyed("preset", "the limitset command needs a Schottky group"));
    }
    if l.letter as usize >= g.letters().len() {
        return Err(keyed("letter", format!("the group has {} letters", g.letters().len())));
    }
    let base = PieceBase::Axis { letter: l.letter };
    let pieces = limitset::orbit_pieces(&g, base, 1.0 / l.t_enumerated, exec).map_err(|e| CliError::Compute(e.to_string()))?;
    let grid: Vec<f64> = if l.t_grid.is_empty() {
        (0..).map(|k| 10f64.powf(1.0 + 0.5 * k as f64)).take_while(|t| *t <= l.t_enumerated * (1.0 + 1e-12)).collect()
    } else {
        l.t_grid.clone()
    };
    let mut csv = String::from("word,diameter,center_re,center_im,radius\n");
    for p in &pieces {
        let w: Vec<String> = p.word.iter().map(|x| x.to_string()).collect();
        csv.push_str(&format!("{},{},{},{},{}\n", w.join(" "), num(p.diameter), num(p.disc.center.re), num(p.disc.center.im), num(p.disc.radius)));
    }
    out.write("pieces.csv", csv.as_bytes())?;
    let rep = limitset::diameter_counts(&pieces, &grid, l.t_enumerated).map_err(|e| CliError::Compute(e.to_string()))?;
    if let Some(res) = l.resolution {
        let img = limitset::render_ppm(&pieces, res, &Window::fit(&pieces)).map_err(|e| CliError::Compute(e.to_string()))?;
        out.write("limitset.ppm", &img)?;
    }
    let mut flags = vec![("pieces", "complete")];
    let orbital = match l.orbital_radius {
        None => Value::Null,
        Some(r) => {
            let x0 = Point::h3(orthocount_core::C64::new(0.0, 0.0), 1.0);
            let d = BallLimits::default();
            let limits = BallLimits { max_elements: l.max_elements.unwrap_or(d.max_elements), max_word_len: l.max_word_len.unwrap_or(d.max_word_len), ..d };
            match groups::estimate_critical_exponent(&g, &x0, &Potential::Zero, r, &limits, exec) {
                Ok(est) => json!({ "radius": r, "delta_hat": est.delta_hat, "halfwidth": est.confidence_halfwidth, "completeness": est.completeness.as_str() }),
                Err(GroupError::BudgetExceeded { reason, .. }) => {
                    flags.push(("orbital", "budget-exceeded"));
                    json!({ "radius": r, "error": reason })
                }
                Err(e) => return Err(CliError::Compute(e.to_string())),
            }
        }
    };
    let doc = json!({
        "command": "limitset",
        "t_enumerated": l.t_enumerated,
        "pieces": pieces.len(),
        "t_grid": rep.t_grid,
        "counts": rep.counts,
        "log_c": rep.log_c,
        "delta_hat": rep.delta_hat,
        "delta_halfwidth": rep.delta_halfwidth,
        "orbital": orbital,
        "provenance": output::provenance(cfg, &flags),
    });
    out.write_json("limitset.json", &doc)?;
    if flags.len() > 1 {
        return Err(CliError::Compute("orbital exponent ball exceeded its budget; partial results written".into()));
    }
    Ok(format!("{} pieces, delta_hat = {} ± {}", pieces.len(), num(rep.delta_hat), num(rep.delta_halfwidth)))
}

fn self_test<E: Executor>(cfg: &ExperimentConfig, out: &OutDir, exec: &E) -> Result<String, CliError> {
    let only = cfg.selftest.as_ref().map(|s| s.only.clone()).unwrap_or_default();
    let results = selftest::run(&only, cfg.seed, exec);
    let lines: Vec<String> = results.iter().map(|r| r.line()).collect();
    let doc = json!({
        "command": "selftest",
        "criteria": results.iter().map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail, "metrics": r.metrics })).collect::<Vec<_>>(),
        "provenance": output::provenance(cfg, &[]),
    });
    out.write_json("selftest.json", &doc)?;
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        Ok(lines.join("\n"))
    } else {
        eprintln!("{}", lines.join("\n"));
        Err(CliError::Compute(format!("criteria failed: {failed:?}")))
    }
}
