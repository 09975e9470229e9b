//! Subcommand implementations. Each command reads a [`RunConfig`], works
//! through the library, and emits CSV/JSON/SVG artifacts under the output
//! directory. Everything is deterministic given the configuration and seed.

use crate::config::RunConfig;
use crate::modelspec::{parse_model, LoadedModel};
use crate::output::{write_csv, write_scatter_svg, Series};
use crate::sims::{run_sim1, run_sim2, PanelOutcome, SIM2_DEFAULT_DRAWS};
use crate::verify::{run_dd_suite, run_dream_suite, run_quantile_suite, VerificationFailure};
use otis_core::models::{
    dd_support, lp_halfspace, lp_support, tprd_map, tprd_theta_support, DisparityMatrix,
};
use otis_core::{
    filter_candidates, restricted_directions, sample_sphere, setapprox, Error as CoreError,
    Halfspace, PartialOtInstance,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;

/// Command failures, keyed to process exit codes.
#[derive(Debug)]
pub enum CommandError {
    /// Exit 2: unreadable input, malformed JSON, inconsistent configuration.
    Config(String),
    /// Exit 3: an oracle-equivalence suite found a mismatch.
    Verification(Box<VerificationFailure>),
    /// Exit 4: the model is degenerate for the requested computation.
    Degenerate(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            CommandError::Verification(_) => 3,
            CommandError::Degenerate(_) => 4,
        }
    }
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommandError::Config(m) => write!(f, "error: {m}"),
            CommandError::Verification(v) => write!(f, "verification failure: {v}"),
            CommandError::Degenerate(m) => write!(f, "degenerate model: {m}"),
        }
    }
}

type CmdResult = Result<(), CommandError>;

fn core_err(e: CoreError) -> CommandError {
    match &e {
        CoreError::SingularMoment(_)
        | CoreError::DegenerateClass(_)
        | CoreError::DegenerateDenominator(_)
        | CoreError::EmptySet
        | CoreError::Infeasible(_) => CommandError::Degenerate(e.to_string()),
        _ => CommandError::Config(e.to_string()),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CommandError {
    CommandError::Config(format!("{}: {e}", path.display()))
}

fn load_model(config: &RunConfig) -> Result<LoadedModel, CommandError> {
    let path = config
        .model
        .as_ref()
        .ok_or_else(|| CommandError::Config("this command needs --model PATH".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_model(&text).map_err(CommandError::Config)
}

fn uniform_box_candidates(
    n: usize,
    bounds: &[(f64, f64)],
    seed: u64,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            bounds
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..=hi))
                .collect()
        })
        .collect()
}

fn direction_rows(dirs: &[Vec<f64>], values: &[f64]) -> Vec<Vec<f64>> {
    dirs.iter()
        .zip(values)
        .map(|(q, &v)| {
            let mut row = q.clone();
            row.push(v);
            row
        })
        .collect()
}

fn dir_header(d: usize, tail: &str) -> Vec<String> {
    let mut h: Vec<String> = (0..d).map(|i| format!("q{i}")).collect();
    h.push(tail.to_string());
    h
}

fn write_named_csv(
    dir: &Path,
    name: &str,
    header: Vec<String>,
    rows: &[Vec<f64>],
) -> Result<(), CommandError> {
    let path = dir.join(name);
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(&path, &header_refs, rows).map_err(|e| io_err(&path, e))
}

/// Evaluate the model's support function on sampled directions and emit one
/// CSV row per direction.
pub fn cmd_support(config: &RunConfig) -> CmdResult {
    config.validate().map_err(CommandError::Config)?;
    let model = load_model(config)?;
    let (dirs, values) = match &model {
        LoadedModel::Dd { model, contrasts } => {
            let e = DisparityMatrix::new(model.num_classes(), contrasts.clone())
                .map_err(core_err)?;
            let dirs = sample_sphere(e.num_measures(), config.directions, config.seed);
            let values: Result<Vec<f64>, _> =
                dirs.iter().map(|p| dd_support(model, &e, p)).collect();
            (dirs, values.map_err(core_err)?)
        }
        LoadedModel::Tprd { model, .. } => {
            let dirs = sample_sphere(2 * model.num_classes(), config.directions, config.seed);
            let values: Result<Vec<f64>, _> =
                dirs.iter().map(|q| tprd_theta_support(model, q)).collect();
            (dirs, values.map_err(core_err)?)
        }
        LoadedModel::LinearProjection { model, .. } => {
            let dirs = if config.restricted {
                restricted_directions(model.d0(), model.dx(), config.directions, config.seed)
            } else {
                sample_sphere(model.dimension(), config.directions, config.seed)
            };
            let values: Result<Vec<f64>, _> = dirs
                .iter()
                .map(|q| {
                    lp_support(model, q).map_err(|e| match e {
                        CoreError::SingularMoment(c) => {
                            eprintln!(
                                "hint: the moment matrix is singular; run `set` to filter \
                                 candidates through the halfspace route instead"
                            );
                            CoreError::SingularMoment(c)
                        }
                        other => other,
                    })
                })
                .collect();
            (dirs, values.map_err(core_err)?)
        }
    };
    let d = dirs[0].len();
    write_named_csv(
        &config.out,
        "support.csv",
        dir_header(d, "support"),
        &direction_rows(&dirs, &values),
    )?;
    println!(
        "support: {} directions of a {} model -> {}",
        dirs.len(),
        model.kind(),
        config.out.join("support.csv").display()
    );
    Ok(())
}

fn halfspace_rows(hs: &[Halfspace]) -> Vec<Vec<f64>> {
    hs.iter()
        .map(|h| {
            let mut row = h.normal.clone();
            row.push(h.offset);
            row
        })
        .collect()
}

fn point_rows(points: impl Iterator<Item = Vec<f64>>) -> Vec<Vec<f64>> {
    points.collect()
}

/// Approximate the identified set: sample directions, build halfspaces,
/// filter candidates, and emit the accepted points with diagnostics.
pub fn cmd_set(config: &RunConfig) -> CmdResult {
    config.validate().map_err(CommandError::Config)?;
    let model = load_model(config)?;
    let out = &config.out;
    match &model {
        LoadedModel::Dd { model, contrasts } => {
            let e = DisparityMatrix::new(model.num_classes(), contrasts.clone())
                .map_err(core_err)?;
            let k = e.num_measures();
            let dirs = sample_sphere(k, config.directions, config.seed);
            let halfspaces: Vec<Halfspace> = dirs
                .into_iter()
                .map(|p| {
                    let h = dd_support(model, &e, &p).map_err(core_err)?;
                    Halfspace::new(p, h).map_err(core_err)
                })
                .collect::<Result<_, _>>()?;
            let bounds = vec![(-1.0, 1.0); k];
            let cands = uniform_box_candidates(config.candidates, &bounds, config.seed ^ 1);
            finish_set(config, out, cands, halfspaces, "delta")
        }
        LoadedModel::Tprd { model, pairs } => {
            let d = 2 * model.num_classes();
            let dirs = sample_sphere(d, config.directions, config.seed);
            let halfspaces: Vec<Halfspace> = dirs
                .into_iter()
                .map(|q| {
                    let h = tprd_theta_support(model, &q).map_err(core_err)?;
                    Halfspace::new(q, h).map_err(core_err)
                })
                .collect::<Result<_, _>>()?;
            let bounds = vec![(0.0, 1.0); d];
            let cands = uniform_box_candidates(config.candidates, &bounds, config.seed ^ 1);
            let approx =
                filter_candidates(cands, halfspaces, config.tol).map_err(core_err)?;
            // Mapped disparity measures of the accepted parameters.
            let mut mapped = Vec::new();
            let mut excluded = 0usize;
            for theta in approx.accepted_points() {
                match tprd_map(theta, pairs) {
                    Ok(deltas) => mapped.push(deltas),
                    Err(CoreError::DegenerateDenominator(_)) => excluded += 1,
                    Err(e) => return Err(core_err(e)),
                }
            }
            write_set_artifacts(config, out, &approx, "theta")?;
            write_named_csv(
                out,
                "mapped.csv",
                (0..pairs.len()).map(|i| format!("delta{i}")).collect(),
                &mapped,
            )?;
            println!(
                "set: accepted {} of {} candidates; mapped {} ({} excluded for vanishing \
                 true-positive mass) -> {}",
                approx.accepted_count(),
                approx.candidates.len(),
                mapped.len(),
                excluded,
                out.display()
            );
            setapprox::diagnostics(&approx).map_err(core_err)?;
            Ok(())
        }
        LoadedModel::LinearProjection { model, candidate_box } => {
            let d = model.dimension();
            let bounds: Vec<(f64, f64)> = candidate_box
                .clone()
                .unwrap_or_else(|| vec![(-2.0, 2.0); d]);
            if bounds.len() != d {
                return Err(CommandError::Config(format!(
                    "candidate box has {} intervals, model dimension is {d}",
                    bounds.len()
                )));
            }
            let cands = uniform_box_candidates(config.candidates, &bounds, config.seed ^ 1);
            let singular = {
                let probe = sample_sphere(d, 1, config.seed)[0].clone();
                matches!(lp_support(model, &probe), Err(CoreError::SingularMoment(_)))
            };
            let halfspaces: Vec<Halfspace> = if config.restricted || singular {
                if singular && !config.restricted {
                    eprintln!(
                        "note: singular moment matrix; filtering through the halfspace route"
                    );
                }
                let ts = if config.restricted {
                    restricted_directions(model.d0(), model.dx(), config.directions, config.seed)
                } else {
                    sample_sphere(d, config.directions, config.seed)
                };
                ts.iter()
                    .map(|t| lp_halfspace(model, t).map_err(core_err))
                    .collect::<Result<_, _>>()?
            } else {
                sample_sphere(d, config.directions, config.seed)
                    .into_iter()
                    .map(|q| {
                        let h = lp_support(model, &q).map_err(core_err)?;
                        Halfspace::new(q, h).map_err(core_err)
                    })
                    .collect::<Result<_, _>>()?
            };
            finish_set(config, out, cands, halfspaces, "theta")
        }
    }
}

fn finish_set(
    config: &RunConfig,
    out: &Path,
    cands: Vec<Vec<f64>>,
    halfspaces: Vec<Halfspace>,
    var: &str,
) -> CmdResult {
    let approx = filter_candidates(cands, halfspaces, config.tol).map_err(core_err)?;
    write_set_artifacts(config, out, &approx, var)?;
    println!(
        "set: accepted {} of {} candidates -> {}",
        approx.accepted_count(),
        approx.candidates.len(),
        out.display()
    );
    setapprox::diagnostics(&approx).map_err(core_err)?;
    Ok(())
}

fn write_set_artifacts(
    config: &RunConfig,
    out: &Path,
    approx: &otis_core::IdentifiedSetApprox,
    var: &str,
) -> Result<(), CommandError> {
    let d = approx.dimension;
    let header: Vec<String> = (0..d).map(|i| format!("{var}{i}")).collect();
    write_named_csv(
        out,
        "accepted.csv",
        header,
        &point_rows(approx.accepted_points().cloned()),
    )?;
    write_named_csv(
        out,
        "halfspaces.csv",
        {
            let mut h: Vec<String> = (0..d).map(|i| format!("normal{i}")).collect();
            h.push("offset".into());
            h
        },
        &halfspace_rows(&approx.halfspaces),
    )?;
    if config.svg && d == 2 {
        let pts: Vec<(f64, f64)> = approx
            .accepted_points()
            .map(|p| (p[0], p[1]))
            .collect();
        let path = out.join("set.svg");
        write_scatter_svg(
            &path,
            "accepted candidates",
            &[Series {
                label: "accepted",
                color: "#2a9d2a",
                points: &pts,
            }],
        )
        .map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

fn panel_files(config: &RunConfig, prefix: &str, panels: &[PanelOutcome]) -> CmdResult {
    let out = &config.out;
    let mut summary: Vec<Vec<f64>> = Vec::new();
    for p in panels {
        let ours = p.accepted_points(true);
        let pacini = p.accepted_points(false);
        let rows = |pts: &[(f64, f64)]| pts.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>();
        write_named_csv(
            out,
            &format!("{prefix}_{}_ours.csv", p.label),
            vec!["alpha_a".into(), "alpha_b".into()],
            &rows(&ours),
        )?;
        write_named_csv(
            out,
            &format!("{prefix}_{}_pacini.csv", p.label),
            vec!["alpha_a".into(), "alpha_b".into()],
            &rows(&pacini),
        )?;
        write_named_csv(
            out,
            &format!("{prefix}_{}_halfspaces.csv", p.label),
            vec!["normal0".into(), "normal1".into(), "offset".into()],
            &halfspace_rows(&p.our_halfspaces),
        )?;
        let (lo, hi) = p.alpha_sum_interval.unwrap_or((f64::NAN, f64::NAN));
        summary.push(vec![
            ours.len() as f64,
            pacini.len() as f64,
            p.contained_in_pacini as u8 as f64,
            p.truth_accepted as u8 as f64,
            p.our_hull_area,
            p.pacini_hull_area,
            lo,
            hi,
        ]);
        if config.svg {
            let path = out.join(format!("{prefix}_{}.svg", p.label));
            write_scatter_svg(
                &path,
                &format!("{prefix} {}", p.label),
                &[
                    Series {
                        label: "outer (restricted directions)",
                        color: "#e8851c",
                        points: &pacini,
                    },
                    Series {
                        label: "identified set",
                        color: "#2a9d2a",
                        points: &ours,
                    },
                ],
            )
            .map_err(|e| io_err(&path, e))?;
        }
        println!(
            "{prefix} {}: ours {} / outer {} candidates, contained = {}, truth accepted = {}",
            p.label,
            ours.len(),
            pacini.len(),
            p.contained_in_pacini,
            p.truth_accepted
        );
    }
    write_named_csv(
        out,
        &format!("{prefix}_summary.csv"),
        vec![
            "accepted_ours".into(),
            "accepted_pacini".into(),
            "contained".into(),
            "truth_accepted".into(),
            "hull_area_ours".into(),
            "hull_area_pacini".into(),
            "alpha_sum_lo".into(),
            "alpha_sum_hi".into(),
        ],
        &summary,
    )
}

/// First simulation design: six correlation panels.
pub fn cmd_sim1(config: &RunConfig) -> CmdResult {
    config.validate().map_err(CommandError::Config)?;
    let panels = run_sim1(config).map_err(core_err)?;
    panel_files(config, "sim1", &panels)
}

/// Second simulation design: six noise-scale panels from one Monte-Carlo
/// base draw.
pub fn cmd_sim2(config: &RunConfig) -> CmdResult {
    config.validate().map_err(CommandError::Config)?;
    let panels = run_sim2(config, SIM2_DEFAULT_DRAWS).map_err(core_err)?;
    panel_files(config, "sim2", &panels)
}

/// Solve one partial transport instance from JSON and print the solution.
pub fn cmd_dream_solve(config: &RunConfig) -> CmdResult {
    let path = config
        .model
        .as_ref()
        .ok_or_else(|| CommandError::Config("dream-solve needs --model PATH".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let inst: PartialOtInstance = serde_json::from_str(&text)
        .map_err(|e| CommandError::Config(format!("cannot parse instance JSON: {e}")))?;
    let inst = PartialOtInstance::new(inst.pi, inst.gamma1, inst.gamma0).map_err(core_err)?;
    let solution = otis_core::solve_dream(&inst).map_err(core_err)?;
    let json = serde_json::to_string_pretty(&solution)
        .map_err(|e| CommandError::Config(e.to_string()))?;
    println!("{json}");
    Ok(())
}

/// Run the oracle-equivalence suites; any mismatch exits nonzero with the
/// offending instance echoed as reproducible JSON.
pub fn cmd_verify(config: &RunConfig) -> CmdResult {
    if config.candidates == 0 {
        println!("warning: instance count is 0, vacuous pass");
        return Ok(());
    }
    let count = config.candidates;
    let suites = [
        run_dream_suite(count, config.seed, 1e-9),
        run_quantile_suite(count, config.seed ^ 2, 1e-9),
        run_dd_suite(count, config.seed ^ 3, 1e-8),
    ];
    for suite in suites {
        match suite {
            Ok(report) => println!(
                "verify {}: {} instances, worst |Δ| = {:.2e}, ok",
                report.name, report.instances, report.worst_error
            ),
            Err(failure) => {
                eprintln!("{failure}");
                return Err(CommandError::Verification(failure));
            }
        }
    }
    Ok(())
}
