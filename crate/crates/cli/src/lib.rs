//! Command-line front end: argument parsing and subcommand dispatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use glassnet::chaos::{horseshoe_report, random_start};
use glassnet::cones::cone_to_polygon;
use glassnet::graph::{build_transition_graph, cycles_to_text, enumerate_cycles, CycleSpec};
use glassnet::integrator::{simulate, Trajectory, TrajectoryEnd};
use glassnet::network::{parse_network_with, GlassNetwork, OrthantCode, ParseOptions};
use glassnet::orbit::analyze_cycle;
use glassnet::polygon::polygons_to_csv;
use glassnet::reference;

#[derive(Debug, Parser)]
#[command(name = "glassnet", version, about = "Exact analysis of Glass switching networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Dot,
    Text,
}

#[derive(Debug, Args)]
pub struct NetworkArg {
    /// Network file.
    pub network: PathBuf,
    /// Accept networks in which a variable feeds back on itself.
    #[arg(long)]
    pub allow_self_input: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the network conditions.
    Validate {
        #[command(flatten)]
        net: NetworkArg,
    },
    /// Integrate a trajectory exactly, one wall crossing at a time.
    Simulate {
        #[command(flatten)]
        net: NetworkArg,
        /// Initial point, comma separated.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        start: Vec<f64>,
        /// Orthant entered when the start lies on a wall.
        #[arg(long)]
        entering: Option<OrthantCode>,
        #[arg(long, default_value_t = 1000)]
        transitions: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orthant transition graph.
    Graph {
        #[command(flatten)]
        net: NetworkArg,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
    /// Elementary cycles of the transition graph.
    Cycles {
        #[command(flatten)]
        net: NetworkArg,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Return map, eigen-data, fixed point, stability and period of a cycle.
    Analyze {
        #[command(flatten)]
        net: NetworkArg,
        #[arg(long)]
        cycle: String,
    },
    /// Returning cone of a cycle.
    Cone {
        #[command(flatten)]
        net: NetworkArg,
        #[arg(long)]
        cycle: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Two-cycle horseshoe analysis; pass `--cycle` twice.
    Horseshoe {
        #[command(flatten)]
        net: NetworkArg,
        #[arg(long, num_args = 1, required = true)]
        cycle: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Directory for the report and CSV files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate every result for the bundled four-variable network.
    ReproPaper {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        transitions: usize,
    },
}

fn load_network(arg: &NetworkArg) -> Result<GlassNetwork> {
    let text = fs::read_to_string(&arg.network)
        .with_context(|| format!("cannot read network file {}", arg.network.display()))?;
    let opts = ParseOptions {
        require_condition2: !arg.allow_self_input,
    };
    parse_network_with(&text, opts).with_context(|| format!("invalid network {}", arg.network.display()))
}

fn parse_cycle(s: &str) -> Result<CycleSpec> {
    CycleSpec::parse(s).with_context(|| format!("invalid cycle {s:?}"))
}

fn checked_cycle(net: &GlassNetwork, s: &str) -> Result<CycleSpec> {
    let cycle = parse_cycle(s)?;
    ensure!(
        cycle.dim() == net.dim(),
        "cycle has dimension {}, network has {}",
        cycle.dim(),
        net.dim()
    );
    build_transition_graph(net)
        .check_cycle(&cycle)
        .with_context(|| format!("cycle {cycle} is not a cycle of the transition graph"))?;
    Ok(cycle)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn trajectory_summary(traj: &Trajectory) -> String {
    let mut out = format!("transitions: {}\n", traj.events.len());
    if let Some(last) = traj.events.last() {
        out.push_str(&format!("final time: {}\n", last.time));
    }
    out.push_str(&match &traj.terminal {
        TrajectoryEnd::ReachedMaxTransitions => "terminal: reached max transitions\n".to_string(),
        TrajectoryEnd::ConvergedToFocalPoint { focal } => {
            format!("terminal: converged to focal point {focal:?}\n")
        }
        TrajectoryEnd::Degenerate { reason, point, code } => {
            format!("terminal: degenerate in {code} at {point:?}: {reason}\n")
        }
    });
    let path: Vec<String> = traj.orthant_path().iter().map(|c| c.to_string()).collect();
    out.push_str(&format!("orthants: {}\n", path.join(",")));
    out
}

/// The last `count` events projected on `(y2, y4)`.
fn y2_y4_csv(traj: &Trajectory, count: usize) -> String {
    let mut out = String::from("k,y2,y4\n");
    let skip = traj.events.len().saturating_sub(count);
    for (k, e) in traj.events.iter().enumerate().skip(skip) {
        out.push_str(&format!("{},{},{}\n", k + 1, e.point[1], e.point[3]));
    }
    out
}

fn reject_format(cmd: &str, format: Format) -> Result<()> {
    bail!("{cmd} does not support --format {format:?}")
}

/// Runs one parsed command, writing its primary output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Validate { net } => {
            let network = load_network(&net)?;
            let report = network.validate_conditions();
            write!(out, "{report}")?;
            ensure!(
                report.condition1_holds() && report.condition2_holds(),
                "network fails validation"
            );
        }
        Command::Simulate {
            net,
            start,
            entering,
            transitions,
            format,
            out: file,
        } => {
            let network = load_network(&net)?;
            let traj = simulate(&network, &start, entering, transitions).context("simulation failed")?;
            let text = match format {
                Format::Csv => traj.to_csv(),
                Format::Text => trajectory_summary(&traj),
                f => return reject_format("simulate", f),
            };
            match file {
                Some(path) => fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Graph { net, format } => {
            let g = build_transition_graph(&load_network(&net)?);
            match format {
                Format::Dot => out.write_all(g.to_dot().as_bytes())?,
                Format::Text => {
                    for (a, b) in g.edges() {
                        writeln!(out, "{a} -> {b}")?;
                    }
                    for c in g.self_fixed() {
                        writeln!(out, "{c} fixed")?;
                    }
                }
                f => return reject_format("graph", f),
            }
        }
        Command::Cycles { net, max_len } => {
            let g = build_transition_graph(&load_network(&net)?);
            let cycles = enumerate_cycles(&g, max_len)?;
            out.write_all(cycles_to_text(&cycles).as_bytes())?;
        }
        Command::Analyze { net, cycle } => {
            let network = load_network(&net)?;
            let cycle = checked_cycle(&network, &cycle)?;
            let analysis = analyze_cycle(&network, &cycle)?;
            out.write_all(analysis.report().as_bytes())?;
        }
        Command::Cone { net, cycle, format } => {
            let network = load_network(&net)?;
            let cycle = checked_cycle(&network, &cycle)?;
            let cone = glassnet::cones::returning_cone(&network, &cycle)?;
            match format {
                Format::Text => {
                    out.write_all(cone.report().as_bytes())?;
                    if cone.dim() == 3 {
                        let poly = cone_to_polygon(&cone)?;
                        writeln!(out, "slice polygon:")?;
                        for v in poly.vertices() {
                            writeln!(out, "  ({}, {})", v[0], v[1])?;
                        }
                    }
                }
                Format::Csv => {
                    let poly = cone_to_polygon(&cone).context("polygon output needs a four-variable network")?;
                    out.write_all(polygons_to_csv([("C", &poly)]).as_bytes())?;
                }
                f => return reject_format("cone", f),
            }
        }
        Command::Horseshoe {
            net,
            cycle,
            seed,
            format,
            out: dir,
        } => {
            ensure!(cycle.len() == 2, "horseshoe needs exactly two --cycle values, got {}", cycle.len());
            let network = load_network(&net)?;
            let c0 = checked_cycle(&network, &cycle[0])?;
            let c1 = checked_cycle(&network, &cycle[1])?;
            let report = horseshoe_report(&network, &c0, &c1, seed)?;
            if let Some(dir) = dir {
                fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
                write_file(&dir, "horseshoe_report.txt", &report.to_text())?;
                write_file(&dir, "polygons.csv", &report.polygons_csv())?;
                write_file(&dir, "marked_points.csv", &report.marked_points_csv())?;
            }
            match format {
                Format::Text => out.write_all(report.to_text().as_bytes())?,
                Format::Csv => out.write_all(report.polygons_csv().as_bytes())?,
                f => return reject_format("horseshoe", f),
            }
        }
        Command::ReproPaper {
            out: dir,
            seed,
            transitions,
        } => repro_paper(&dir, seed, transitions, out)?,
    }
    Ok(())
}

/// Every artefact for the bundled network, written into `dir`.
pub fn repro_paper(dir: &Path, seed: u64, transitions: usize, log: &mut dyn Write) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let net = reference::horseshoe_network();
    let (c0, c1) = (reference::cycle_0(), reference::cycle_1());

    write_file(dir, "network.gn", &net.to_text())?;
    let graph = build_transition_graph(&net);
    write_file(dir, "graph.dot", &graph.to_dot())?;
    write_file(dir, "cycles.txt", &cycles_to_text(&enumerate_cycles(&graph, 8)?))?;

    for (k, c) in [&c0, &c1].into_iter().enumerate() {
        let a = analyze_cycle(&net, c).with_context(|| format!("analysis of cycle {k}"))?;
        let text = format!("{}\nreturning cone:\n{}", a.report(), a.cone.report());
        write_file(dir, &format!("cycle{k}_analysis.txt"), &text)?;
    }

    let start = random_start(net.dim(), seed);
    let traj = simulate(&net, &start, None, transitions).context("trajectory simulation")?;
    write_file(dir, "trajectory.csv", &traj.to_csv())?;
    write_file(dir, "trajectory_y2_y4.csv", &y2_y4_csv(&traj, 500))?;

    let mut report = horseshoe_report(&net, &c0, &c1, seed).context("horseshoe analysis")?;
    report.record_trajectory(&traj);
    write_file(dir, "cones.csv", &report.polygons_csv())?;
    write_file(dir, "marked_points.csv", &report.marked_points_csv())?;
    write_file(dir, "horseshoe_report.txt", &report.to_text())?;

    writeln!(log, "wrote results for the bundled network to {}", dir.display())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("glassnet").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn negative_start_values_parse() {
        let cli = parse(&["simulate", "net.gn", "--start", "-0.1,0.2,-0.3"]);
        match cli.command {
            Command::Simulate { start, transitions, .. } => {
                assert_eq!(start, vec![-0.1, 0.2, -0.3]);
                assert_eq!(transitions, 1000);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_flag_rejected() {
        assert!(Cli::try_parse_from(["glassnet", "graph", "n.gn", "--bogus"]).is_err());
    }

    #[test]
    fn seed_defaults_to_zero() {
        match parse(&["horseshoe", "n.gn", "--cycle", "01,11", "--cycle", "01,11"]).command {
            Command::Horseshoe { seed, cycle, .. } => {
                assert_eq!(seed, 0);
                assert_eq!(cycle.len(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn y2_y4_keeps_tail() {
        let net = reference::horseshoe_network();
        let traj = simulate(&net, &[0.1, -0.2, 0.3, -0.4], None, 20).unwrap();
        let csv = y2_y4_csv(&traj, 5);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("16,"));
    }
}
