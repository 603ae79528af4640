//! The `ninfty` command line. Exit codes: 0 success, 1 negative verdict,
//! 2 input error, 3 resource cap.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::graph::all_graph_subgroups;
use crate::group::{all_subgroups, conjugacy_classes, subgroup_generated, FiniteGroup, Limits, Subgroup};
use crate::io::{
    build_tower, canonical, canonical_compact, descriptor_json, families_json, load_group, load_sequence,
    parse_families, parse_mode, rho_json, witness_json, Mode, SequenceDoc,
};
use crate::norms::{norms_to_sequence, NormSpec};
use crate::realizability::{
    enumerate_realizable, is_realizable_within, realizable_closure_within, sequence_poset, Coverage, FamilySequence, Verdict,
};

#[derive(Debug, Parser)]
#[command(name = "ninfty", version, about = "Realizability of graph-subgroup family sequences for finite groups")]
struct Cli {
    /// Worker threads for parallel searches.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cache directory (default: $NINFTY_CACHE, then the platform cache dir).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Compute everything afresh and store nothing.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Order, subgroups and conjugacy classes of a group.
    Group {
        /// Builtin spec (C4, S3, D4, K4, C2xS3, ...) or group JSON file.
        group: String,
        #[arg(long)]
        subgroups: bool,
        #[arg(long)]
        conjugacy: bool,
    },
    /// Graph subgroups of G x S_n with their (H, rho) decompositions.
    Graphs {
        group: String,
        #[arg(long)]
        arity: usize,
    },
    #[command(subcommand)]
    Seq(SeqCommand),
}

#[derive(Debug, Subcommand)]
enum SeqCommand {
    /// Decide realizability; exit 1 with a witness when it fails.
    Check {
        file: PathBuf,
        /// Reject levels that are not already closed families.
        #[arg(long)]
        strict: bool,
    },
    /// Smallest realizable sequence containing the file's.
    Close {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
    },
    /// Smallest realizable N-infinity sequence admitting the given norms.
    FromNorms {
        group: String,
        #[arg(long)]
        max_arity: usize,
        /// `H:K` as comma-separated generators, e.g. `1:` for H = <1>, K = 1.
        #[arg(long = "norm")]
        norms: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Every realizable sequence up to the given arity, with its poset.
    Enumerate {
        group: String,
        #[arg(long)]
        max_arity: usize,
        /// `full`, or `h:<file>` with a family of subgroups of G.
        #[arg(long, default_value = "full")]
        mode: String,
        /// Write the Hasse diagram as DOT.
        #[arg(long)]
        poset: Option<PathBuf>,
    },
}

/// Successful command result: stdout text and exit code (0 or 1).
struct Outcome {
    stdout: String,
    code: i32,
}

impl Outcome {
    fn ok(v: &Value) -> Self {
        Outcome { stdout: canonical(v), code: 0 }
    }
}

struct Context {
    limits: Limits,
    cache: Cache,
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let cache = if cli.no_cache { Cache::disabled() } else { Cache::locate(cli.cache_dir.as_deref()) };
    let ctx = Context { limits: Limits::default(), cache };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&ctx, cli.command)) {
        Ok(out) => {
            let _ = stdout.write_all(out.stdout.as_bytes());
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_cap() {
                3
            } else {
                2
            }
        }
    }
}

fn dispatch(ctx: &Context, command: Command) -> Result<Outcome> {
    match command {
        Command::Group { group, subgroups, conjugacy } => cmd_group(ctx, &group, subgroups, conjugacy),
        Command::Graphs { group, arity } => cmd_graphs(ctx, &group, arity),
        Command::Seq(SeqCommand::Check { file, strict }) => cmd_check(ctx, &file, strict),
        Command::Seq(SeqCommand::Close { file, output, strict }) => cmd_close(ctx, &file, output.as_deref(), strict),
        Command::Seq(SeqCommand::FromNorms { group, max_arity, norms, output }) => {
            cmd_from_norms(ctx, &group, max_arity, &norms, output.as_deref())
        }
        Command::Seq(SeqCommand::Enumerate { group, max_arity, mode, poset }) => {
            cmd_enumerate(ctx, &group, max_arity, &mode, poset.as_deref())
        }
    }
}

fn group_arg(ctx: &Context, arg: &str) -> Result<Arc<FiniteGroup>> {
    Ok(Arc::new(load_group(arg, None, &ctx.limits)?))
}

fn cached_subgroups(ctx: &Context, group: &FiniteGroup) -> Result<Vec<Subgroup>> {
    let key = Cache::key(group, "subgroups", &json!({}));
    let payload = ctx.cache.get_or_compute(&key, || {
        let subs = all_subgroups(group, &ctx.limits)?;
        Ok(json!(subs.iter().map(Subgroup::elements).collect::<Vec<_>>()))
    })?;
    let lists: Vec<Vec<usize>> = serde_json::from_value(payload)?;
    lists.into_iter().map(|e| Subgroup::new(group, e)).collect()
}

fn cmd_group(ctx: &Context, arg: &str, subgroups: bool, conjugacy: bool) -> Result<Outcome> {
    let group = group_arg(ctx, arg)?;
    let mut out = json!({ "label": group.label(), "order": group.order(), "abelian": group.is_abelian() });
    if subgroups || conjugacy {
        let subs = cached_subgroups(ctx, &group)?;
        if subgroups {
            out["subgroups"] = json!(subs
                .iter()
                .enumerate()
                .map(|(i, s)| json!({ "index": i, "order": s.order(), "elements": s.elements() }))
                .collect::<Vec<_>>());
        }
        if conjugacy {
            out["conjugacy_classes"] = json!(conjugacy_classes(&group, &subs));
        }
    }
    Ok(Outcome::ok(&out))
}

fn cmd_graphs(ctx: &Context, arg: &str, arity: usize) -> Result<Outcome> {
    let group = group_arg(ctx, arg)?;
    let tower = build_tower(group, arity, &ctx.limits)?;
    let graphs = all_graph_subgroups(&tower, arity)?
        .into_iter()
        .map(|(datum, s)| {
            Ok(json!({
                "H": datum.h.elements(),
                "rho": rho_json(&tower, &datum.h, &datum.rho, arity),
                "subgroup": descriptor_json(&tower, arity, &s)?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::ok(&json!({ "arity": arity, "count": graphs.len(), "graphs": graphs })))
}

fn cmd_check(ctx: &Context, file: &Path, strict: bool) -> Result<Outcome> {
    let doc = load_sequence(file, strict, &ctx.limits)?;
    match is_realizable_within(&doc.sequence, doc.mode.scope())? {
        Verdict::Realizable => Ok(Outcome::ok(&json!({ "realizable": true }))),
        Verdict::NotRealizable(w) => {
            let v = json!({ "realizable": false, "witness": witness_json(doc.sequence.tower(), &w)? });
            Ok(Outcome { stdout: canonical(&v), code: 1 })
        }
    }
}

fn write_or_print(doc: &SequenceDoc, output: Option<&Path>) -> Result<Outcome> {
    let text = canonical(&doc.to_json()?);
    match output {
        None => Ok(Outcome { stdout: text, code: 0 }),
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(Outcome::ok(&json!({ "sizes": sizes(&doc.sequence) })))
        }
    }
}

fn sizes(seq: &FamilySequence) -> Vec<usize> {
    seq.families().iter().map(|f| f.len()).collect()
}

fn cmd_close(ctx: &Context, file: &Path, output: Option<&Path>, strict: bool) -> Result<Outcome> {
    let doc = load_sequence(file, strict, &ctx.limits)?;
    // general-mode sequences with non-graph members only get levelwise closure,
    // which loading already applied
    let sequence = if doc.mode == Mode::General && !doc.sequence.is_graph_sequence() {
        doc.sequence.clone()
    } else {
        realizable_closure_within(&doc.sequence, doc.mode.scope())?
    };
    write_or_print(&SequenceDoc { sequence, ..doc }, output)
}

/// `H:K` with each side a comma-separated generator list.
fn parse_norm(group: &FiniteGroup, text: &str) -> Result<(Subgroup, Subgroup)> {
    let (h, k) = text
        .split_once(':')
        .ok_or_else(|| Error::Input(format!("norm {text:?} should look like H:K")))?;
    let gens = |side: &str| -> Result<Subgroup> {
        let mut out = Vec::new();
        for tok in side.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let g: usize = tok.parse().map_err(|_| Error::Input(format!("{tok:?} is not an element index")))?;
            if g >= group.order() {
                return Err(Error::Input(format!("element {g} out of range for {}", group.label())));
            }
            out.push(g);
        }
        Ok(subgroup_generated(group, &out))
    };
    Ok((gens(h)?, gens(k)?))
}

fn cmd_from_norms(ctx: &Context, arg: &str, max_arity: usize, norms: &[String], output: Option<&Path>) -> Result<Outcome> {
    let group = group_arg(ctx, arg)?;
    let pairs = norms.iter().map(|n| parse_norm(&group, n)).collect::<Result<Vec<_>>>()?;
    let spec = NormSpec::new(pairs)?;
    let tower = Arc::new(build_tower(group, max_arity, &ctx.limits)?);
    let sequence = norms_to_sequence(&tower, &spec)?;
    write_or_print(&SequenceDoc { group: arg.to_string(), mode: Mode::NInfinity, sequence }, output)
}

/// Stable content hash of a sequence's families.
pub fn sequence_id(seq: &FamilySequence) -> Result<String> {
    let digest = Sha256::digest(canonical_compact(&families_json(seq)?));
    Ok(hex::encode(&digest[..8]))
}

fn cmd_enumerate(ctx: &Context, arg: &str, max_arity: usize, mode: &str, poset: Option<&Path>) -> Result<Outcome> {
    let group = group_arg(ctx, arg)?;
    let mode = match mode {
        "full" => Mode::NInfinity,
        other => {
            let path = other
                .strip_prefix("h:")
                .ok_or_else(|| Error::Input(format!("mode {other:?} should be full or h:<file>")))?;
            let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            match parse_mode(&group, &v, &ctx.limits)? {
                m @ Mode::HFamily(_) => m,
                _ => return Err(Error::Input(format!("{path} does not describe a family of subgroups"))),
            }
        }
    };
    let coverage = mode.coverage().unwrap_or(Coverage::Full);
    let tower = Arc::new(build_tower(group.clone(), max_arity, &ctx.limits)?);
    let key = Cache::key(&group, "enumerate", &json!({ "max_arity": max_arity, "mode": mode.to_json() }));
    let payload = ctx.cache.get_or_compute(&key, || {
        let seqs = enumerate_realizable(&tower, &coverage)?;
        Ok(json!(seqs.iter().map(families_json).collect::<Result<Vec<_>>>()?))
    })?;
    let seqs = payload
        .as_array()
        .ok_or_else(|| Error::Input("corrupt cache entry".into()))?
        .iter()
        .map(|v| parse_families(&tower, v, false))
        .collect::<Result<Vec<_>>>()?;
    let ids = seqs.iter().map(sequence_id).collect::<Result<Vec<_>>>()?;
    let edges = sequence_poset(&seqs)?;
    if let Some(path) = poset {
        std::fs::write(path, poset_dot(&seqs, &ids, &edges))?;
    }
    let listed = seqs
        .iter()
        .zip(&ids)
        .map(|(s, id)| Ok(json!({ "id": id, "sizes": sizes(s), "families": families_json(s)? })))
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::ok(&json!({
        "group": arg,
        "max_arity": max_arity,
        "mode": mode.to_json(),
        "count": seqs.len(),
        "sequences": listed,
        "edges": edges.iter().map(|&(a, b)| json!([ids[a], ids[b]])).collect::<Vec<_>>(),
    })))
}

/// Hasse diagram, smaller sequence pointing at larger.
pub fn poset_dot(seqs: &[FamilySequence], ids: &[String], edges: &[(usize, usize)]) -> String {
    let mut out = String::from("digraph nintfy_poset {\n");
    for (s, id) in seqs.iter().zip(ids) {
        let sizes: Vec<String> = sizes(s).iter().map(usize::to_string).collect();
        out.push_str(&format!("  \"{id}\" [label=\"sizes {}\"];\n", sizes.join(",")));
    }
    for &(a, b) in edges {
        out.push_str(&format!("  \"{}\" -> \"{}\";\n", ids[a], ids[b]));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["ninfty", "--no-cache"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn group_command() {
        let (code, out, _) = call(&["group", "S3", "--subgroups", "--conjugacy"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["order"], 6);
        assert_eq!(v["subgroups"].as_array().unwrap().len(), 6);
        assert_eq!(v["conjugacy_classes"].as_array().unwrap().len(), 4);
        let (code, _, err) = call(&["group", "Q7"]);
        assert_eq!(code, 2);
        assert!(err.contains("Q7"));
    }

    #[test]
    fn norm_parsing() {
        let g = crate::group::make_builtin("C4", &Limits::default()).unwrap();
        let (h, k) = parse_norm(&g, "1:2").unwrap();
        assert_eq!((h.order(), k.order()), (4, 2));
        let (h, k) = parse_norm(&g, "1:").unwrap();
        assert_eq!((h.order(), k.order()), (4, 1));
        assert!(parse_norm(&g, "1").is_err());
        assert!(parse_norm(&g, "9:").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["seq", "frobnicate"]).0, 2);
        assert_eq!(call(&["graphs", "C2"]).0, 2);
        assert_eq!(call(&["graphs", "C2", "--arity", "9"]).0, 2);
    }
}
