use std::path::Path;

use coalition_var::analysis::conjecture::conjecture_probe;
use coalition_var::analysis::properties::{
    run_property_suite_with, Property, PropertyReport, SuiteConfig,
};
use coalition_var::analysis::significance::{
    significance_table_with, SignificanceRow, BORDERLINE_MARGIN,
};
use coalition_var::analysis::sweep::{asymptotic_sweep, Family};
use coalition_var::exact::DEFAULT_EXACT_LIMIT;
use coalition_var::numeric::CompensatedSum;
use coalition_var::{
    all_profiles, average_uncertainty, estimate_all, estimate_parallel, EstimateReport,
    ExactEngine, Game, PlayerId, PlayerProfile, Result as CoreResult, Weighting,
};
use serde::Serialize;

use crate::fail::{CmdResult, Failure, EXIT_VIOLATION};
use crate::format::{emit, flag, json, num, Table};
use crate::gamefile::{self, NamedGame};
use crate::{attribution, generator, Format, GameSource, WeightingArg};

pub const EXACT_LIMIT_VAR: &str = "COALITION_VAR_EXACT_LIMIT";
/// Largest game `generate` writes out coalition by coalition.
pub const MAX_GENERATED_PLAYERS: usize = 20;

fn exact_limit() -> CmdResult<usize> {
    match std::env::var(EXACT_LIMIT_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::input(format!(
                "{EXACT_LIMIT_VAR} must be a player count, got '{v}'"
            ))
        }),
        Err(_) => Ok(DEFAULT_EXACT_LIMIT),
    }
}

fn load_source(source: &GameSource) -> CmdResult<NamedGame> {
    match (&source.game, &source.generate) {
        (_, Some(spec)) => generator::parse(spec),
        (Some(path), None) => gamefile::load(path),
        (None, None) => Err(Failure::input("give a game file or --generate SPEC")),
    }
}

fn weighting(arg: WeightingArg) -> Weighting {
    match arg {
        WeightingArg::Shapley => Weighting::Shapley,
        WeightingArg::Banzhaf => Weighting::Banzhaf,
    }
}

fn render(table: &Table, trailer: &str, format: Format) -> CmdResult<String> {
    Ok(match format {
        Format::Text => table.text() + trailer,
        _ => table.csv()?,
    })
}

#[derive(Serialize)]
struct ProfileRow<'a> {
    player: &'a str,
    v: f64,
    r: f64,
    sqrt_r: f64,
}

#[derive(Serialize)]
struct EvalReport<'a> {
    weighting: &'a str,
    players: Vec<ProfileRow<'a>>,
    sum_v: f64,
    grand_value: f64,
    average_r: f64,
}

pub fn eval(source: &GameSource, w: WeightingArg, format: Format) -> CmdResult {
    let named = load_source(source)?;
    let profiles = ExactEngine::new(exact_limit()?).all_profiles(&named.game, &weighting(w))?;
    let sum_v: f64 = profiles
        .iter()
        .map(|p| p.v)
        .collect::<CompensatedSum>()
        .value();
    let grand = named.game.grand_value();
    let average = average_uncertainty(&profiles)?;

    let out = if format == Format::Json {
        json(&EvalReport {
            weighting: if w == WeightingArg::Shapley {
                "shapley"
            } else {
                "banzhaf"
            },
            players: profiles
                .iter()
                .zip(&named.names)
                .map(|(p, name)| ProfileRow {
                    player: name,
                    v: p.v,
                    r: p.r,
                    sqrt_r: p.sd,
                })
                .collect(),
            sum_v,
            grand_value: grand,
            average_r: average,
        })
    } else {
        let mut t = Table::new(["player", "V", "R", "sqrtR"]);
        for (p, name) in profiles.iter().zip(&named.names) {
            t.row(vec![name.clone(), num(p.v), num(p.r), num(p.sd)]);
        }
        if format == Format::Csv {
            t.row(vec!["sum".into(), num(sum_v), String::new(), String::new()]);
            t.row(vec![
                "grand-coalition".into(),
                num(grand),
                String::new(),
                String::new(),
            ]);
            t.row(vec![
                "average".into(),
                String::new(),
                num(average),
                String::new(),
            ]);
        }
        let trailer = format!(
            "\nsum of V         {}\ngrand coalition  {}\naverage R        {}\n",
            num(sum_v),
            num(grand),
            num(average)
        );
        render(&t, &trailer, format)?
    };
    emit(&out, None)
}

#[derive(Serialize)]
struct SampleRow<'a> {
    player: &'a str,
    #[serde(flatten)]
    report: &'a EstimateReport,
}

pub fn sample(
    source: &GameSource,
    player: Option<&str>,
    samples: u64,
    seed: u64,
    chunks: usize,
    format: Format,
) -> CmdResult {
    let named = load_source(source)?;
    let reports = match player {
        Some(name) => {
            let i = named.player_index(name)?;
            vec![estimate_parallel(
                &named.game,
                PlayerId(i),
                samples,
                seed,
                chunks,
            )?]
        }
        None => estimate_all(&named.game, samples, seed, chunks)?,
    };
    let out = if format == Format::Json {
        let rows: Vec<SampleRow> = reports
            .iter()
            .map(|r| SampleRow {
                player: &named.names[r.player.index()],
                report: r,
            })
            .collect();
        json(&rows)
    } else {
        let mut t = Table::new(["player", "V", "R", "sqrtR", "se", "ci_low", "ci_high"]);
        for r in &reports {
            t.row(vec![
                named.names[r.player.index()].clone(),
                num(r.v_hat),
                num(r.r_hat),
                num(r.r_hat.sqrt()),
                num(r.se_v),
                num(r.ci95_v.0),
                num(r.ci95_v.1),
            ]);
        }
        let trailer =
            format!("\nsamples {samples}, seed {seed}, chunks {chunks}; 95% interval for V\n");
        render(&t, &trailer, format)?
    };
    emit(&out, None)
}

pub fn generate(spec: &str, output: Option<&Path>) -> CmdResult {
    let named = generator::parse(spec)?;
    let n = named.game.n_players();
    if n > MAX_GENERATED_PLAYERS {
        return Err(Failure::input(format!(
            "{n} players would need 2^{n} coalition rows (max {MAX_GENERATED_PLAYERS} players); \
             evaluate it directly with `coalition-var eval --generate {spec}`"
        )));
    }
    emit(&json(&gamefile::to_file(&named)?), output)
}

#[derive(Serialize)]
struct AttribReport<'a> {
    z_crit: f64,
    factors: &'a [SignificanceRow],
    sum_v: f64,
    grand_value: f64,
    notes: &'a [String],
}

fn borderline_notes(rows: &[SignificanceRow], z_crit: f64) -> Vec<String> {
    rows.iter()
        .filter(|r| r.is_borderline(z_crit))
        .map(|r| {
            format!(
                "note: {} has z = {}, within {} of the threshold {}; its verdict depends on the test convention",
                r.label,
                num(r.z),
                BORDERLINE_MARGIN,
                num(z_crit)
            )
        })
        .collect()
}

pub fn attrib(file: &Path, z_crit: f64, format: Format) -> CmdResult {
    let named = attribution::load(file)?;
    let profiles = all_profiles(&named.game, &Weighting::Shapley)?;
    let inputs: Vec<(&str, f64, f64)> = profiles
        .iter()
        .zip(&named.names)
        .map(|(p, name)| (name.as_str(), p.v, p.r))
        .collect();
    let rows = significance_table_with(&inputs, z_crit)?;
    let sum_v: f64 = profiles
        .iter()
        .map(|p| p.v)
        .collect::<CompensatedSum>()
        .value();
    let grand = named.game.grand_value();
    let notes = borderline_notes(&rows, z_crit);

    let out = match format {
        Format::Json => json(&AttribReport {
            z_crit,
            factors: &rows,
            sum_v,
            grand_value: grand,
            notes: &notes,
        }),
        _ => {
            let mut t = Table::new(["factor", "V", "R", "sqrtR", "z", "significant"]);
            for r in &rows {
                t.row(vec![
                    r.label.clone(),
                    num(r.v),
                    num(r.sd * r.sd),
                    num(r.sd),
                    num(r.z),
                    flag(r.significant),
                ]);
            }
            if format == Format::Csv {
                for note in &notes {
                    eprintln!("{note}");
                }
                t.row(vec![
                    "sum".into(),
                    num(sum_v),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
                t.row(vec![
                    "grand-coalition".into(),
                    num(grand),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
            }
            let mut trailer = format!(
                "\nsum of V         {}\ngrand coalition  {}\nsignificant when z > {}\n",
                num(sum_v),
                num(grand),
                num(z_crit)
            );
            for note in &notes {
                trailer.push_str(note);
                trailer.push('\n');
            }
            render(&t, &trailer, format)?
        }
    };
    emit(&out, None)
}

fn negated(g: &Game) -> CoreResult<Vec<PlayerProfile>> {
    let mut p = all_profiles(g, &Weighting::Shapley)?;
    for x in &mut p {
        x.r = -x.r;
    }
    Ok(p)
}

fn exact(g: &Game) -> CoreResult<Vec<PlayerProfile>> {
    all_profiles(g, &Weighting::Shapley)
}

pub fn check(
    property: &str,
    trials: u64,
    seed: u64,
    n: usize,
    format: Format,
    inject: bool,
) -> CmdResult {
    let properties: Vec<Property> = if property == "all" {
        Property::ALL.to_vec()
    } else {
        vec![property.parse()?]
    };
    let cfg = SuiteConfig { trials, seed, n };
    let profiles: &coalition_var::analysis::properties::ProfileFn =
        if inject { &negated } else { &exact };
    let reports = properties
        .iter()
        .map(|&p| run_property_suite_with(p, &cfg, profiles))
        .collect::<CoreResult<Vec<PropertyReport>>>()?;
    let failed = reports.iter().filter(|r| !r.passed()).count();

    let out = if format == Format::Json {
        json(&reports)
    } else {
        let mut t = Table::new([
            "property",
            "n",
            "instances",
            "checks",
            "violations",
            "max_gap",
            "result",
        ]);
        for r in &reports {
            t.row(vec![
                r.property.to_string(),
                r.n.to_string(),
                r.instances.to_string(),
                r.checks.to_string(),
                r.violation_count.to_string(),
                num(r.max_gap),
                if r.passed() { "PASS" } else { "FAIL" }.into(),
            ]);
        }
        let mut trailer = format!(
            "\ntrials {trials}, seed {seed}, tolerance {}\n",
            num(reports[0].tolerance)
        );
        for r in reports.iter().filter(|r| !r.passed()) {
            let v = &r.violations[0];
            trailer.push_str(&format!(
                "\nwitness for {}: trial {}, game {}, player {}\n  {}: lhs {} vs rhs {} (gap {})\n",
                r.property,
                v.trial,
                v.fingerprint,
                v.player.map_or("-".to_string(), |p| (p + 1).to_string()),
                v.detail,
                num(v.lhs),
                num(v.rhs),
                num(v.gap)
            ));
            for table in &v.witness {
                let cells: Vec<String> = table.iter().map(|&x| num(x)).collect();
                trailer.push_str(&format!("  [{}]\n", cells.join(", ")));
            }
        }
        render(&t, &trailer, format)?
    };
    emit(&out, None)?;
    if failed > 0 {
        return Err(Failure::new(
            EXIT_VIOLATION,
            format!("{failed} of {} properties violated", reports.len()),
        ));
    }
    Ok(())
}

/// `3..201:2,500` style size lists; ranges include both ends.
pub fn parse_sizes(spec: &str) -> CmdResult<Vec<usize>> {
    let bad = || {
        Failure::input(format!(
            "bad size list '{spec}'; use e.g. 10,20 or 3..201:2"
        ))
    };
    let mut sizes = Vec::new();
    for item in spec.split(',').map(str::trim) {
        if let Some((lo, rest)) = item.split_once("..") {
            let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi.trim().parse().map_err(|_| bad())?;
            let step: usize = step.trim().parse().map_err(|_| bad())?;
            if step == 0 || hi < lo {
                return Err(bad());
            }
            sizes.extend((lo..=hi).step_by(step));
        } else {
            sizes.push(item.parse().map_err(|_| bad())?);
        }
    }
    Ok(sizes)
}

pub fn sweep(
    family: &str,
    k: f64,
    sizes: &str,
    output: Option<&Path>,
    format: Format,
) -> CmdResult {
    let family: Family = family.parse()?;
    let report = asymptotic_sweep(family, k, &parse_sizes(sizes)?)?;
    let trend = &report.trend;
    eprintln!(
        "reference {}, monotone {}, approaching {}, final relative gap {}",
        num(report.reference),
        flag(trend.monotone),
        flag(trend.approaching),
        num(trend.final_rel_gap)
    );
    let out = if format == Format::Json {
        json(&report)
    } else {
        let mut t = Table::new(["N", "V", "R", "scaled"]);
        for r in &report.rows {
            t.row(vec![r.n.to_string(), num(r.v), num(r.r), num(r.scaled)]);
        }
        render(&t, "", format)?
    };
    emit(&out, output)
}

pub fn probe(n: usize, trials: u64, seed: u64, format: Format) -> CmdResult {
    let report = conjecture_probe(n, trials, seed)?;
    let out = if format == Format::Json {
        json(&report)
    } else {
        let w = &report.witness;
        let list = |t: &[f64]| t.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ");
        format!(
            "n {}, trials {}, seed {}, ratios evaluated {}, skipped {}\n\
             smallest R(G+H) / (R(G) + R(H)) = {}\n\
             witness: trial {}, player {}, R(G) {}, R(H) {}, R(G+H) {}\n  G = [{}]\n  H = [{}]\n",
            report.n,
            report.trials,
            report.seed,
            report.evaluated,
            report.skipped,
            num(report.worst_ratio),
            w.trial,
            w.player + 1,
            num(w.r_g),
            num(w.r_h),
            num(w.r_sum),
            list(&w.g),
            list(&w.h)
        )
    };
    emit(&out, None)
}
