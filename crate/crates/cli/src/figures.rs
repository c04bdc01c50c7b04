//! Data sets behind the published figures, one directory per invocation.

use std::path::Path;

use esdlab_core::analysis::{sweep, Channel, EsdSearch, Scenario, SweepAxis};
use esdlab_core::consts::BELL_THRESHOLD;
use esdlab_core::states::{EwlParams, Flavor};
use log::info;
use serde_json::{json, Map, Value};

use crate::commands::{check_channel, linear_grid};
use crate::config::ScenarioConfig;
use crate::csv_out::{format_esd, format_f64, Table};
use crate::error::{CliError, CliResult};
use crate::CoherenceArg;

const FIG1A_A2: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
const FIG1B_R: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
const FIG4A_R: [f64; 3] = [0.8, 0.9, 1.0];
/// ESD search horizon for fig2, as Ω_A·t.
const FIG2_SEARCH_OMEGA: f64 = 1e8;

struct Output {
    tables: Vec<(String, Table)>,
    grids: Map<String, Value>,
    derived: Map<String, Value>,
}

impl Output {
    fn new() -> Self {
        Self {
            tables: Vec::new(),
            grids: Map::new(),
            derived: Map::new(),
        }
    }
}

fn column_label(prefix: &str, v: f64) -> String {
    format!("{prefix}_{}", format_f64(v))
}

/// Analytic curves, one column per scenario.
fn curves(cfg: &ScenarioConfig, columns: &[(String, Scenario, Channel)]) -> CliResult<Table> {
    let omega_a = cfg.qubit_a.omega_rad_s;
    let grid = cfg.omega_t_grid();
    let times: Vec<f64> = grid.iter().map(|wt| wt / omega_a).collect();
    let values = columns
        .iter()
        .map(|(_, sc, ch)| Ok(sc.curve(*ch, &times, None)?.values().to_vec()))
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = Table::new(std::iter::once("omega_t".to_string()).chain(columns.iter().map(|c| c.0.clone())));
    for (k, &wt) in grid.iter().enumerate() {
        let mut row = vec![wt];
        row.extend(values.iter().map(|v| v[k]));
        table.push_values(&row);
    }
    Ok(table)
}

/// Monte Carlo columns (mean and standard error) followed by analytic ones.
fn mc_curves(
    cfg: &ScenarioConfig,
    mc_columns: &[(String, Scenario)],
    spa_columns: &[(String, Scenario)],
) -> CliResult<Table> {
    check_channel(cfg, Channel::MonteCarlo)?;
    let omega_a = cfg.qubit_a.omega_rad_s;
    let grid = cfg.omega_t_grid();
    let times: Vec<f64> = grid.iter().map(|wt| wt / omega_a).collect();
    let settings = cfg.mc_settings();
    let mut header = vec!["omega_t".to_string()];
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for (label, sc) in mc_columns {
        info!("monte carlo: {label}");
        let curve = sc.curve(Channel::MonteCarlo, &times, Some(&settings))?;
        header.push(label.clone());
        header.push(format!("stderr_{label}"));
        cols.push(curve.values().to_vec());
        cols.push(curve.stderr().map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; grid.len()]));
    }
    for (label, sc) in spa_columns {
        header.push(label.clone());
        cols.push(sc.curve(Channel::Adiabatic, &times, None)?.values().to_vec());
    }
    let mut table = Table::new(header);
    for (k, &wt) in grid.iter().enumerate() {
        let mut row = vec![wt];
        row.extend(cols.iter().map(|c| c[k]));
        table.push_values(&row);
    }
    Ok(table)
}

fn resonant(sc: &Scenario) -> Scenario {
    Scenario {
        qubit_b: sc.qubit_a,
        ..*sc
    }
}

fn fig1(cfg: &ScenarioConfig, sc: &Scenario, over_a2: bool, out: &mut Output) -> CliResult<()> {
    let s = sc.state;
    let columns = if over_a2 {
        FIG1A_A2
            .iter()
            .map(|&a2| {
                let st = EwlParams::from_a2(s.r(), a2, s.flavor())?.with_b_phase(s.b_phase());
                Ok((column_label("a2", a2), sc.with_state(st), Channel::Adiabatic))
            })
            .collect::<CliResult<Vec<_>>>()?
    } else {
        FIG1B_R
            .iter()
            .map(|&r| {
                let st = EwlParams::new(r, s.a(), s.flavor())?.with_b_phase(s.b_phase());
                Ok((column_label("r", r), sc.with_state(st), Channel::Adiabatic))
            })
            .collect::<CliResult<Vec<_>>>()?
    };
    let (name, key, grid) = if over_a2 {
        ("fig1a", "a2", &FIG1A_A2[..])
    } else {
        ("fig1b", "r", &FIG1B_R[..])
    };
    out.grids.insert(key.into(), json!(grid));
    out.tables.push((format!("{name}.csv"), curves(cfg, &columns)?));
    Ok(())
}

fn fig2(cfg: &ScenarioConfig, sc: &Scenario, out: &mut Output) -> CliResult<()> {
    let r_grid = linear_grid(0.35, 1.0, 131)?;
    let omega_a = cfg.qubit_a.omega_rad_s;
    let search = EsdSearch::new(sc.time_unit());
    let t_max = FIG2_SEARCH_OMEGA / omega_a;
    out.grids.insert("r".into(), json!(r_grid));
    out.grids.insert("search_max_omega_t".into(), json!(FIG2_SEARCH_OMEGA));
    let mut p_exp = Map::new();
    for flavor in Flavor::ALL {
        let base = sc.with_state(sc.state.with_flavor(flavor));
        let mut table = Table::new([
            "r",
            "omega_t_esd_adiabatic",
            "omega_t_esd_quantum",
            "omega_t_esd_combined",
        ]);
        let columns = [Channel::Adiabatic, Channel::Quantum, Channel::Interplay]
            .into_iter()
            .map(|ch| sweep(&base, SweepAxis::Purity, &r_grid, ch, t_max, &search, None))
            .collect::<Result<Vec<_>, _>>()?;
        for (k, &r) in r_grid.iter().enumerate() {
            let mut row = vec![format_f64(r)];
            row.extend(
                columns
                    .iter()
                    .map(|col| format_esd(col[k].esd.expect("parameter sweeps fill esd").time.scaled(omega_a))),
            );
            table.push_row(row);
        }
        out.tables.push((format!("fig2_{flavor}.csv"), table));
        let point = base.esd(Channel::Interplay, t_max, &search, None)?;
        p_exp.insert(flavor.name().into(), json!(point.time.scaled(omega_a).as_f64()));
    }
    out.derived.insert(
        "p_exp_omega_t_esd_combined".into(),
        json!({"r": sc.state.r(), "phi": p_exp["phi"], "psi": p_exp["psi"]}),
    );
    Ok(())
}

fn fig3(cfg: &ScenarioConfig, sc: &Scenario, out: &mut Output) -> CliResult<()> {
    let omega_a = cfg.qubit_a.omega_rad_s;
    let search = EsdSearch::new(sc.time_unit());
    let mut crossings = Map::new();
    for flavor in Flavor::ALL {
        let base = sc.with_state(sc.state.with_flavor(flavor));
        let columns = [
            ("adiabatic".to_string(), base, Channel::Adiabatic),
            ("quantum".to_string(), base, Channel::Quantum),
            ("interplay".to_string(), base, Channel::Interplay),
        ];
        out.tables.push((format!("fig3_{flavor}.csv"), curves(cfg, &columns)?));
        let t = base.level_crossing(Channel::Interplay, BELL_THRESHOLD, 1e8 / omega_a, &search, None)?;
        crossings.insert(flavor.name().into(), json!(t.scaled(omega_a).as_f64()));
    }
    out.derived.insert("interplay_bell_crossing_omega_t".into(), Value::Object(crossings));
    Ok(())
}

fn max_abs_diff(a: &Table, col_a: usize, col_b: usize) -> f64 {
    a.column(col_a)
        .zip(a.column(col_b))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn fig4a(cfg: &ScenarioConfig, sc: &Scenario, out: &mut Output) -> CliResult<()> {
    let s = sc.state;
    let mut detuning_effect = Map::new();
    for r in FIG4A_R {
        let detuned = sc.with_state(EwlParams::new(r, s.a(), s.flavor())?.with_b_phase(s.b_phase()));
        let res = resonant(&detuned);
        let table = mc_curves(
            cfg,
            &[("mc_detuned".into(), detuned), ("mc_resonant".into(), res)],
            &[("spa_detuned".into(), detuned), ("spa_resonant".into(), res)],
        )?;
        detuning_effect.insert(format_f64(r), json!(max_abs_diff(&table, 1, 3)));
        out.tables.push((format!("fig4a_{}.csv", column_label("r", r)), table));
    }
    out.grids.insert("r".into(), json!(FIG4A_R));
    out.derived.insert("max_abs_detuning_effect".into(), Value::Object(detuning_effect));
    Ok(())
}

fn fig4b(cfg: &ScenarioConfig, sc: &Scenario, out: &mut Output) -> CliResult<()> {
    let uncoupled = sc.with_coupling(0.0);
    let table = mc_curves(
        cfg,
        &[
            ("coupled_detuned".into(), *sc),
            ("uncoupled_detuned".into(), uncoupled),
            ("uncoupled_resonant".into(), resonant(&uncoupled)),
        ],
        &[],
    )?;
    out.derived.insert("max_abs_coupling_effect".into(), json!(max_abs_diff(&table, 1, 3)));
    out.tables.push(("fig4b.csv".into(), table));
    Ok(())
}

fn gnuplot_script(csv_name: &str, table: &Table) -> String {
    let stem = csv_name.trim_end_matches(".csv");
    let n = table.header().len();
    let log_y = if table.header()[1].starts_with("omega_t_esd") {
        "set logscale y\n"
    } else {
        ""
    };
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel '{x}'\n\
         {log_y}\
         set terminal pngcairo size 800,500\n\
         set output '{stem}.png'\n\
         plot for [i=2:{n}] '{csv_name}' using 1:i with lines\n",
        x = table.header()[0],
    )
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn figure(
    name: &str,
    cfg: &ScenarioConfig,
    model: CoherenceArg,
    out_dir: &Path,
    gnuplot: bool,
) -> CliResult<()> {
    let sc = cfg.scenario()?.with_coherence_model(model.into());
    let mut out = Output::new();
    match name {
        "fig1a" => fig1(cfg, &sc, true, &mut out)?,
        "fig1b" => fig1(cfg, &sc, false, &mut out)?,
        "fig2" => fig2(cfg, &sc, &mut out)?,
        "fig3" => fig3(cfg, &sc, &mut out)?,
        "fig4a" => fig4a(cfg, &sc, &mut out)?,
        "fig4b" => fig4b(cfg, &sc, &mut out)?,
        other => return Err(CliError::Config(format!("unknown figure {other:?}"))),
    }

    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut files = Vec::new();
    for (file, table) in &out.tables {
        table.write(&out_dir.join(file))?;
        files.push(file.clone());
        if gnuplot {
            let gp = format!("{}.gp", file.trim_end_matches(".csv"));
            write_text(&out_dir.join(&gp), &gnuplot_script(file, table))?;
            files.push(gp);
        }
    }

    let mut config = cfg.to_json();
    config["qubit_b"] = serde_json::to_value(cfg.qubit_b()).map_err(CliError::runtime)?;
    let coherence = match model {
        CoherenceArg::Factorized => "factorized",
        CoherenceArg::CrossTerm => "cross-term",
    };
    let manifest = json!({
        "figure": name,
        "version": env!("ESDLAB_VERSION"),
        "time_axis": "omega_t, with omega of qubit_a",
        "config": config,
        "coherence_model": coherence,
        "grids": out.grids,
        "derived": out.derived,
        "files": files,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(CliError::runtime)?;
    write_text(&out_dir.join("manifest.json"), &(text + "\n"))?;
    info!("wrote {} files to {}", files.len() + 1, out_dir.display());
    Ok(())
}
