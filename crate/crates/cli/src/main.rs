use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use warcomb::census::{states_matching_wl, states_necessarily_random};
use warcomb::engine::{
    classify, default_max_rounds, enumerate_random_branches, parse_state, play_random, play_wl, Classification,
    GameState, GameTrace,
};
use warcomb::graphs::{build_game_graph, forest_decomposition, orient, Orientation};
use warcomb::numerics::ratio_string;
use warcomb::posets::{
    build_random_poset, count_states_random_necessary, count_states_wl_mcard, random_bottom_tree, wl_poset,
    wl_tree_component, Poset,
};
use warcomb::trees::{label_tree, labeled_forest_dot, seq_to_tree, tree_to_seq, FullBinaryTree};
use warcomb::verify::{run_suite, Options, Suite};
use warcomb::winloss::{
    count_sequences_passthrough, count_sequences_rounds, enumerate_sequences_passthrough, enumerate_sequences_rounds,
    parse_sequence, WinLossSequence,
};

#[derive(Parser)]
#[command(name = "warcomb", version, about = "Exact combinatorics for single-suit War")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game and print its trace.
    Simulate {
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value = "wl")]
        putback: Putback,
        /// Seed for the generator choosing random putback orders.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_rounds: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// List every random-putback branch with its weight.
    Branches {
        #[arg(long)]
        state: String,
        #[arg(long)]
        max_rounds: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate or count win-loss sequences.
    Sequences {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        length: Length,
        #[arg(long)]
        count_only: bool,
    },
    /// Full binary tree of a unicard sequence, or labeled trees of a game.
    Tree {
        #[arg(long, required_unless_present = "state", conflicts_with = "state")]
        sequence: Option<String>,
        /// Label the trees of this state's WL-putback game instead.
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        dot: bool,
    },
    /// Game graph of a game.
    Graph {
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value = "wl")]
        putback: Putback,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        orient: Option<Orient>,
        #[arg(long, default_value_t = 1)]
        start_round: usize,
        #[arg(long)]
        dot: bool,
    },
    /// Poset of states following a sequence.
    Poset {
        #[arg(long)]
        sequence: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, value_enum)]
        mode: PosetMode,
        #[arg(long)]
        dot: bool,
    },
    /// Closed-form number of states following a sequence.
    Count {
        #[arg(long)]
        sequence: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, value_enum)]
        mode: CountMode,
        /// Cross-check against exhaustive enumeration.
        #[arg(long)]
        verify: bool,
    },
    /// Run verification suites and print a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        /// Worker threads for census runs.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Length {
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    passthroughs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Putback {
    Wl,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Orient {
    Winner,
    Alice,
}

#[derive(Clone, Copy, ValueEnum)]
enum PosetMode {
    Wl,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountMode {
    Wl,
    RandomNecessary,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

fn state_arg(text: &str) -> Result<GameState, Failure> {
    parse_state(text).map_err(|e| usage(format!("invalid state {text:?}: {e}")))
}

fn sequence_arg(text: &str, m: usize) -> Result<WinLossSequence, Failure> {
    parse_sequence(text, m).map_err(|e| usage(format!("invalid sequence {text:?}: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn play(state: &GameState, putback: Putback, seed: u64, max_rounds: usize) -> GameTrace {
    match putback {
        Putback::Wl => play_wl(state, max_rounds),
        Putback::Random => play_random(state, max_rounds, &mut ChaCha8Rng::seed_from_u64(seed)),
    }
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    trace: &'a GameTrace,
    sequence: Option<String>,
    classification: Option<Classification>,
}

fn simulate(
    state: &str,
    putback: Putback,
    seed: u64,
    max_rounds: Option<usize>,
    json: bool,
) -> Result<String, Failure> {
    let state = state_arg(state)?;
    let trace = play(
        &state,
        putback,
        seed,
        max_rounds.unwrap_or(default_max_rounds(state.n())),
    );
    let sequence = WinLossSequence::from_trace(&trace).ok().map(|s| s.stylize());
    let classification = classify(&trace).ok();
    if json {
        return Ok(to_json(&SimulateOutput {
            trace: &trace,
            sequence,
            classification,
        }));
    }
    let mut out = format!("state {}\n", trace.initial);
    for r in &trace.rounds {
        out += &format!(
            "{:>4}  {} vs {}  {:?} wins, puts back {} {}\n",
            r.index, r.alice_card, r.bob_card, r.winner, r.putback.0, r.putback.1
        );
    }
    out += &format!("final {}\noutcome {:?}\n", trace.final_state(), trace.outcome);
    if let Some(s) = sequence {
        out += &format!("sequence {s}\n");
    }
    if let Some(c) = classification {
        out += &format!(
            "rounds {} passthroughs {} single-use {}\n",
            c.rounds, c.passthroughs, c.single_use
        );
    }
    out += &format!("weight {}", ratio_string(&trace.weight));
    Ok(out)
}

fn branches(state: &str, max_rounds: Option<usize>, json: bool) -> Result<String, Failure> {
    let state = state_arg(state)?;
    let all = enumerate_random_branches(&state, max_rounds.unwrap_or(default_max_rounds(state.n())));
    if json {
        return Ok(to_json(&all));
    }
    let lines: Vec<String> = all
        .iter()
        .map(|t| {
            let seq = WinLossSequence::from_trace(t).map_or_else(|_| "-".to_string(), |s| s.stylize());
            format!(
                "{}  {:?}  rounds {}  {}  final {}",
                ratio_string(&t.weight),
                t.outcome,
                t.rounds.len(),
                seq,
                t.final_state()
            )
        })
        .collect();
    Ok(lines.join("\n"))
}

fn sequences(m: usize, length: &Length, count_only: bool) -> Result<String, Failure> {
    if m == 0 {
        return Err(usage("--m must be at least 1"));
    }
    match (length.rounds, length.passthroughs) {
        (Some(r), _) if count_only => Ok(count_sequences_rounds(m, r).to_string()),
        (Some(r), _) => Ok(join(enumerate_sequences_rounds(m, r))),
        (_, Some(k)) if count_only => Ok(count_sequences_passthrough(m, k).to_string()),
        (_, Some(k)) => Ok(join(enumerate_sequences_passthrough(m, k))),
        _ => Err(usage("one of --rounds or --passthroughs is required")),
    }
}

fn join(seqs: Vec<WinLossSequence>) -> String {
    seqs.iter().map(|s| s.stylize()).collect::<Vec<_>>().join("\n")
}

fn describe_tree(tree: &FullBinaryTree) -> String {
    let mut levels: Vec<Vec<char>> = Vec::new();
    for v in tree.level_order() {
        let d = tree.depth(v);
        if levels.len() <= d {
            levels.push(Vec::new());
        }
        levels[d].push(tree.letter(v).as_char());
    }
    let mut out = format!(
        "sequence {}\nheight {}\nnodes {}\n",
        tree_to_seq(tree).stylize(),
        tree.height(),
        tree.len()
    );
    for (i, level) in levels.iter().enumerate() {
        let letters: Vec<String> = level.iter().map(char::to_string).collect();
        out += &format!("level {}: {}\n", i + 1, letters.join(" "));
    }
    out.trim_end().to_string()
}

fn tree(sequence: Option<&str>, state: Option<&str>, dot: bool) -> Result<String, Failure> {
    if let Some(text) = sequence {
        let seq = sequence_arg(text, 1)?;
        let tree = seq_to_tree(&seq).map_err(usage)?;
        return Ok(if dot { tree.to_dot() } else { describe_tree(&tree) });
    }
    let state = state_arg(state.expect("clap requires one of --sequence or --state"))?;
    let trace = play_wl(&state, default_max_rounds(state.n()));
    let trees = label_tree(&trace).map_err(usage)?;
    if dot {
        return Ok(labeled_forest_dot(&trees));
    }
    let mut out = Vec::new();
    for t in &trees {
        out.push(format!("block {}", t.root_card()));
        let mut level = usize::MAX;
        let mut line = String::new();
        for v in t.tree().level_order() {
            let d = t.tree().depth(v);
            if d != level {
                if !line.is_empty() {
                    out.push(line.clone());
                }
                line = format!("  level {}:", d + 1);
                level = d;
            }
            let (a, b) = t.label(v);
            line += &format!(" {}({a}/{b})", t.tree().letter(v).as_char());
        }
        out.push(line);
    }
    Ok(out.join("\n"))
}

fn graph(
    state: &str,
    putback: Putback,
    seed: u64,
    orientation: Option<Orient>,
    start_round: usize,
    dot: bool,
) -> Result<String, Failure> {
    let state = state_arg(state)?;
    let trace = play(&state, putback, seed, default_max_rounds(state.n()));
    if let Some(o) = orientation {
        let mode = match o {
            Orient::Winner => Orientation::WinnerToLoser,
            Orient::Alice => Orientation::AliceToBob,
        };
        let digraph = orient(&trace, mode, start_round).map_err(usage)?;
        if dot {
            return Ok(digraph.to_dot());
        }
        let mut out = vec![format!(
            "roots {}",
            digraph
                .roots
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        )];
        for a in &digraph.arcs {
            let kind = if a.alice_won { "alice-won" } else { "bob-won" };
            out.push(format!("{} -> {}  round {}  {kind}", a.from, a.to, a.round));
        }
        return Ok(out.join("\n"));
    }
    let graph = build_game_graph(&trace);
    if dot {
        return Ok(graph.to_dot());
    }
    let mut out: Vec<String> = graph.edges().iter().map(|(a, b)| format!("{a} -- {b}")).collect();
    match forest_decomposition(&graph) {
        Ok(forest) => {
            for (i, t) in forest.trees.iter().enumerate() {
                let cards: Vec<String> = t.vertices.iter().map(|c| c.to_string()).collect();
                out.push(format!("tree {}: {}", i + 1, cards.join(" ")));
            }
            let isolated: Vec<String> = forest.isolated.iter().map(|c| c.to_string()).collect();
            out.push(format!("isolated: {}", isolated.join(" ")));
        }
        Err(e) => out.push(format!("not a forest: {e}")),
    }
    Ok(out.join("\n"))
}

fn describe_poset(p: &Poset) -> String {
    let mut out: Vec<String> = p
        .covers()
        .iter()
        .map(|c| format!("{} > {}  {:?}", p.label(c.greater), p.label(c.lesser), c.style))
        .collect();
    out.insert(0, format!("elements {}", p.len()));
    out.join("\n")
}

fn poset(sequence: &str, m: usize, mode: PosetMode, dot: bool) -> Result<String, Failure> {
    let seq = sequence_arg(sequence, m)?;
    let (p, tree) = match mode {
        PosetMode::Wl => (wl_poset(&seq), wl_tree_component(&seq).ok()),
        PosetMode::Random => (
            build_random_poset(&seq).map_err(usage)?,
            Some(random_bottom_tree(&seq).map_err(usage)?),
        ),
    };
    if dot {
        return Ok(p.to_dot());
    }
    let mut out = describe_poset(&p);
    if let Some(t) = tree {
        let hooks: Vec<String> = t
            .labels()
            .iter()
            .zip(t.hooks())
            .map(|(l, h)| format!("h({l})={h}"))
            .collect();
        out += &format!("\ntree {}", hooks.join(" "));
    }
    Ok(out)
}

fn count(sequence: &str, m: usize, mode: CountMode, verify: bool) -> Result<String, Failure> {
    let seq = sequence_arg(sequence, m)?;
    let n = seq.m() + seq.rounds();
    let closed = match mode {
        CountMode::Wl => count_states_wl_mcard(&seq),
        CountMode::RandomNecessary => count_states_random_necessary(&seq),
    }
    .map_err(usage)?;
    if !verify {
        return Ok(closed.to_string());
    }
    if n > 10 {
        return Err(usage(format!("census on {n} cards is too large (limit 10)")));
    }
    let states = match mode {
        CountMode::Wl => states_matching_wl(&seq, n),
        CountMode::RandomNecessary => states_necessarily_random(&seq, n),
    }
    .map_err(usage)?;
    let out = format!("closed form {closed}\ncensus {} on {n} cards", states.len());
    if closed == states.len() {
        Ok(out)
    } else {
        Err(Failure {
            code: 1,
            message: format!("{out}\nmismatch"),
        })
    }
}

fn verify(suite: Suite, max_n: usize, jobs: Option<usize>) -> Result<String, Failure> {
    let options = Options { max_n };
    let report = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(usage)?
            .install(|| run_suite(suite, &options)),
        None => run_suite(suite, &options),
    };
    let text = to_json(&report);
    if report.pass {
        Ok(text)
    } else {
        // the report still goes to standard out
        println!("{text}");
        Err(Failure {
            code: 1,
            message: "verification failed".to_string(),
        })
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Simulate {
            state,
            putback,
            seed,
            max_rounds,
            json,
        } => simulate(&state, putback, seed, max_rounds, json),
        Command::Branches {
            state,
            max_rounds,
            json,
        } => branches(&state, max_rounds, json),
        Command::Sequences { m, length, count_only } => sequences(m, &length, count_only),
        Command::Tree { sequence, state, dot } => tree(sequence.as_deref(), state.as_deref(), dot),
        Command::Graph {
            state,
            putback,
            seed,
            orient,
            start_round,
            dot,
        } => graph(&state, putback, seed, orient, start_round, dot),
        Command::Poset { sequence, m, mode, dot } => poset(&sequence, m, mode, dot),
        Command::Count {
            sequence,
            m,
            mode,
            verify,
        } => count(&sequence, m, mode, verify),
        Command::Verify { suite, max_n, jobs } => verify(suite, max_n, jobs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", text.trim_end());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
