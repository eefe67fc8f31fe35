use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use borkh::cleaved::Algebra;
use borkh::diagram::{combine, zeta_string, TangleDiagram};
use borkh::field::RankMode;
use borkh::pairing;
use borkh::planar::{enumerate_matchings, Side};
use borkh::reduce;
use borkh::type_a;
use borkh::type_d;
use borkh::weightmoves;

/// Build, verify, pair and reduce the twisted bordered structures of tangle
/// diagrams over the rational-function field of characteristic two.
#[derive(Parser)]
#[command(name = "borkh", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of human-readable tables.
    #[arg(long, global = true)]
    json: bool,
    /// Rank computation mode.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Seed for randomized rank certification.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Abort (exit 3) when a structure would have more states than this.
    #[arg(long, global = true, default_value_t = 100_000)]
    max_states: usize,
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Exact,
    Randomized,
}

#[derive(Subcommand)]
enum Command {
    /// Build the type D structure of a right tangle.
    BuildD(FileArg),
    /// Build the type A structure of a left tangle.
    BuildA(FileArg),
    /// Verify structure equations and gradings.
    Verify {
        /// Which structure to verify: d, a, or all.
        #[arg(long, value_parser = ["d", "a", "all"], default_value = "all")]
        r#type: String,
        file: PathBuf,
    },
    /// Pair a left and a right tangle into a chain complex.
    Pair {
        left: PathBuf,
        right: PathBuf,
        /// Also build the whole-diagram complex and compare.
        #[arg(long)]
        compare_oracle: bool,
    },
    /// Homology ranks of the paired complex.
    Homology {
        /// Pair these two diagram files (left then right).
        #[arg(long, num_args = 2, value_names = ["LEFT", "RIGHT"])]
        pair: Vec<PathBuf>,
    },
    /// Cancel the free-circle states and compare with the closed form.
    Reduce(FileArg),
    /// Build and verify the weight-move morphisms at a crossing.
    Weightmove {
        file: PathBuf,
        /// Crossing id, as named in the diagram file.
        #[arg(long)]
        crossing: String,
    },
    /// Write the named fixture files into a directory.
    Fixtures {
        name: String,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct FileArg {
    file: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &PathBuf) -> anyhow::Result<TangleDiagram> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    Ok(TangleDiagram::parse(&text)?)
}

fn state_budget(d: &TangleDiagram, max: usize) -> Result<(), ExitCode> {
    let mut total = 0usize;
    for m in enumerate_matchings(d.n) {
        for mask in 0..(1u32 << d.crossings.len()) {
            let cs = combine(&d.resolve(mask), &m);
            total += 1 << (cs.circles.len() - 1);
            if total > max {
                eprintln!("state count exceeds --max-states {max}");
                return Err(ExitCode::from(3));
            }
        }
    }
    Ok(())
}

fn rank_mode(cli: &Cli) -> RankMode {
    match cli.mode {
        Mode::Exact => RankMode::Exact,
        Mode::Randomized => RankMode::Randomized { seed: cli.seed },
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::BuildD(arg) => {
            let d = load(&arg.file)?;
            require_side(&d, Side::Right)?;
            if let Err(code) = state_budget(&d, cli.max_states) {
                return Ok(code);
            }
            let alg = Algebra::new(d.n);
            let t = type_d::build_delta(&d, &alg);
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&type_d::dump(&t))?);
            } else {
                print_d(&t);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::BuildA(arg) => {
            let d = load(&arg.file)?;
            require_side(&d, Side::Left)?;
            if let Err(code) = state_budget(&d, cli.max_states) {
                return Ok(code);
            }
            let alg = Algebra::new(d.n);
            let a = type_a::build(&d, &alg);
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&type_a::dump(&a))?);
            } else {
                print_a(&a);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { r#type, file } => {
            let d = load(file)?;
            if let Err(code) = state_budget(&d, cli.max_states) {
                return Ok(code);
            }
            let alg = Algebra::new(d.n);
            let mut pass = true;
            let wants_d = r#type == "d" || (r#type == "all" && d.side == Side::Right);
            let wants_a = r#type == "a" || (r#type == "all" && d.side == Side::Left);
            if wants_d {
                require_side(&d, Side::Right)?;
                let t = type_d::build_delta(&d, &alg);
                let r = type_d::verify_structure(&t);
                let g = type_d::verify_grading(&t);
                report("type D structure equation", &r, &mut pass);
                report("type D grading", &g, &mut pass);
            }
            if wants_a {
                require_side(&d, Side::Left)?;
                let a = type_a::build(&d, &alg);
                let r = type_a::verify_ainf(&a);
                report("module relations", &r, &mut pass);
            }
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Pair {
            left,
            right,
            compare_oracle,
        } => {
            let l = load(left)?;
            let r = load(right)?;
            require_side(&l, Side::Left)?;
            require_side(&r, Side::Right)?;
            if l.n != r.n {
                anyhow::bail!("sides have different n");
            }
            if let Err(code) = state_budget(&l, cli.max_states) {
                return Ok(code);
            }
            if let Err(code) = state_budget(&r, cli.max_states) {
                return Ok(code);
            }
            let alg = Algebra::new(l.n);
            let a = type_a::build(&l, &alg);
            let d = type_d::build_delta(&r, &alg);
            let paired = pairing::box_tensor(&a, &(&d).into());
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&pairing::dump(&paired, rank_mode(cli))?)?
                );
            } else {
                println!(
                    "paired complex: {} generators, d^2 = 0: {}",
                    paired.len(),
                    paired.d_squared_is_zero()
                );
            }
            if *compare_oracle {
                let oracle = pairing::twisted_khovanov(&l, &r);
                let ok = pairing::canonical_bijection(&a, &d, &paired, &oracle)
                    .map(|bij| pairing::compare(&paired, &oracle, &bij))
                    .unwrap_or(false);
                println!("isomorphic: {ok}");
                if !ok {
                    return Ok(ExitCode::from(1));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Homology { pair } => {
            let [left, right] = &pair[..] else {
                anyhow::bail!("--pair needs two files");
            };
            let l = load(left)?;
            let r = load(right)?;
            require_side(&l, Side::Left)?;
            require_side(&r, Side::Right)?;
            if let Err(code) = state_budget(&r, cli.max_states) {
                return Ok(code);
            }
            let alg = Algebra::new(l.n);
            let a = type_a::build(&l, &alg);
            let d = type_d::build_delta(&r, &alg);
            let paired = pairing::box_tensor(&a, &(&d).into());
            let ranks = paired.homology_ranks(rank_mode(cli))?;
            let pretty: BTreeMap<String, usize> = ranks
                .iter()
                .map(|(&z, &k)| (zeta_string(z), k))
                .collect();
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&pretty)?);
            } else if pretty.is_empty() {
                println!("homology is zero");
            } else {
                for (z, k) in &pretty {
                    println!("{z}: {k}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce(arg) => {
            let d = load(&arg.file)?;
            require_side(&d, Side::Right)?;
            if let Err(code) = state_budget(&d, cli.max_states) {
                return Ok(code);
            }
            let alg = Algebra::new(d.n);
            let t = type_d::build_delta(&d, &alg);
            let data = reduce::reduce_free_circles(&t)?;
            let r = reduce::verify_structure_mat(&alg, &data.reduced.alive, &data.reduced.delta);
            let (_, cf) = reduce::closed_form(&t);
            let mut agree = true;
            let keys: std::collections::BTreeSet<(usize, usize)> = data
                .reduced
                .delta
                .terms
                .keys()
                .chain(cf.terms.keys())
                .copied()
                .collect();
            for (i, j) in keys {
                let mut diff = data.reduced.delta.get(i, j);
                diff.add(&cf.get(i, j));
                if alg.is_zero(&diff) != Ok(true) {
                    agree = false;
                }
            }
            if cli.json {
                let table = |m: &reduce::DMat| -> Vec<serde_json::Value> {
                    let mut out = Vec::new();
                    for (&(i, j), e) in &m.terms {
                        for (w, c) in &e.terms {
                            out.push(serde_json::json!({
                                "from": i,
                                "to": j,
                                "generator": w.gens.iter()
                                    .map(|&g| borkh::cleaved::describe_kind(&alg.generator(g).kind))
                                    .collect::<Vec<_>>(),
                                "coeff": c.display(&d.registry).to_string(),
                            }));
                        }
                    }
                    out
                };
                let dump = serde_json::json!({
                    "states": data.reduced.alive,
                    "delta": table(&data.reduced.delta),
                    "iota": table(&data.iota),
                    "pi": table(&data.pi),
                    "homotopy": table(&data.homotopy),
                    "structure_equation": r.pass(),
                    "closed_form_agreement": agree,
                });
                println!("{}", serde_json::to_string_pretty(&dump)?);
            } else {
                println!(
                    "reduced to {} states ({} cancelled), {} nonzero entries",
                    data.reduced.alive.len(),
                    t.states.len() - data.reduced.alive.len(),
                    data.reduced.delta.terms.len()
                );
                println!("reduced structure equation: {}", verdict(r.pass()));
                println!("closed form agreement: {}", verdict(agree));
            }
            Ok(if r.pass() && agree {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Weightmove { file, crossing } => {
            let d = load(file)?;
            require_side(&d, Side::Right)?;
            if let Err(code) = state_budget(&d, cli.max_states) {
                return Ok(code);
            }
            let c = d.crossing_index(crossing)?;
            let alg = Algebra::new(d.n);
            match weightmoves::working_move(&d, c, &alg) {
                Some((mv, r1, r2, ident)) => {
                    println!(
                        "moved weight {} across {} ({:?})",
                        mv.w.display(&d.registry),
                        crossing,
                        mv.route
                    );
                    println!("forward morphism: {}", verdict(r1.pass()));
                    println!("reverse morphism: {}", verdict(r2.pass()));
                    println!("composites are the identity: {ident}");
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("no redistribution verifies at {crossing}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Fixtures { name, dir } => {
            let Some(files) = borkh::fixtures::files_for(name) else {
                anyhow::bail!("unknown fixture {name:?}");
            };
            std::fs::create_dir_all(dir)?;
            for (stem, body) in files {
                let path = dir.join(format!("{stem}.json"));
                std::fs::write(&path, body.trim_start())?;
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn require_side(d: &TangleDiagram, side: Side) -> anyhow::Result<()> {
    if d.side != side {
        anyhow::bail!("expected a {side} tangle diagram");
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn report(what: &str, r: &type_d::Report, pass: &mut bool) {
    println!("{what}: {} ({} blocks)", verdict(r.pass()), r.checked);
    for f in &r.failures {
        println!("  {f}");
    }
    *pass &= r.pass();
}

fn print_d(t: &type_d::TypeDStructure<'_>) {
    println!("{} states", t.states.len());
    for (i, terms) in t.delta.iter().enumerate() {
        if terms.is_empty() {
            continue;
        }
        let parts: Vec<String> = terms
            .iter()
            .map(|term| {
                format!(
                    "{}.{} (x) {}",
                    term.coeff.display(&t.diagram.registry),
                    borkh::cleaved::describe_kind(&t.algebra.generator(term.gen).kind),
                    term.target
                )
            })
            .collect();
        println!(
            "delta({i}) [zeta {}] = {}",
            zeta_string(t.zeta4(i)),
            parts.join(" + ")
        );
    }
}

fn print_a(a: &type_a::TypeAStructure<'_>) {
    println!("{} states", a.states.len());
    let dump = type_a::dump(a);
    for s in &dump.states {
        if !s.m1.is_empty() {
            let parts: Vec<String> = s.m1.iter().map(|(t, c)| format!("{c}.{t}")).collect();
            println!("m1({}) = {}", s.id, parts.join(" + "));
        }
        for act in &s.actions {
            let parts: Vec<String> = act
                .outputs
                .iter()
                .map(|(t, c)| format!("{c}.{t}"))
                .collect();
            println!("m2({} (x) {}) = {}", s.id, act.generator, parts.join(" + "));
        }
    }
}
