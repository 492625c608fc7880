//! The `refine` subcommand: resumable refinement runs split by orbit.
//!
//! A run directory holds `manifest.json`, `done.txt` (one `0`/`1` per task),
//! `tasks.tsv` (per-task counts), `tasks/<i>/` catalogues for tasks that
//! found something, and the merged `catalogue/`.

use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use netrel::classify::SpeciesCatalogue;
use netrel::search::{self, CandidateRule, RefineOptions, RefinePlan, StrategyChoice, SymmetryMode};
use netrel::templates::{self, Template};

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Alternate,
    Sequential,
    Auto,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Full,
    Stabilizer,
    Off,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Balanced,
    Monochromatic,
}

#[derive(Args)]
pub struct RefineArgs {
    /// Template file (required unless resuming).
    #[arg(long, required_unless_present = "resume")]
    template: Option<PathBuf>,
    /// New run directory.
    #[arg(long, short, conflicts_with = "resume")]
    out: Option<PathBuf>,
    /// Continue the run in this directory with its recorded settings.
    #[arg(long)]
    resume: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    strategy: Strategy,
    /// Largest candidate-count ratio that still alternates (auto strategy).
    #[arg(long, default_value_t = 2.0)]
    ratio: f64,
    /// Task range `A..B` to run (default: all).
    #[arg(long)]
    orbits: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Squares refined to full classes (default: all, or all but the last for odd templates).
    #[arg(long)]
    complete: Option<usize>,
    #[arg(long, value_enum, default_value = "full")]
    symmetry: Symmetry,
    #[arg(long, value_enum, default_value = "balanced")]
    rule: Rule,
    /// Reorder squares so that an exchanged pair comes last.
    #[arg(long)]
    preferred_order: bool,
    /// Give up on a task after this many search nodes; it stays pending.
    #[arg(long)]
    node_limit: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct OrbitInfo {
    size: usize,
    leader: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct Manifest {
    tool: String,
    version: String,
    /// The searched template, squares already in search order.
    template: String,
    canonical: String,
    square_order: Vec<usize>,
    complete: usize,
    rule: Rule,
    strategy: Strategy,
    ratio: f64,
    symmetry: Symmetry,
    tasks: usize,
    orbits: Vec<OrbitInfo>,
}

fn options(complete: usize, rule: Rule, strategy: Strategy, ratio: f64, symmetry: Symmetry, node_limit: Option<u64>) -> RefineOptions {
    RefineOptions {
        complete: Some(complete),
        rule: match rule {
            Rule::Balanced => CandidateRule::Balanced,
            Rule::Monochromatic => CandidateRule::Monochromatic,
        },
        strategy: match strategy {
            Strategy::Alternate => StrategyChoice::Alternate,
            Strategy::Sequential => StrategyChoice::Sequential,
            Strategy::Auto => StrategyChoice::Auto { ratio },
        },
        symmetry: match symmetry {
            Symmetry::Full => SymmetryMode::Full,
            Symmetry::Stabilizer => SymmetryMode::Stabilizer,
            Symmetry::Off => SymmetryMode::Off,
        },
        node_limit,
    }
}

fn manifest_of(t: &Template, order: Vec<usize>, m: &Manifest, plan: &RefinePlan) -> Manifest {
    Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        template: t.to_text(),
        canonical: templates::canonical_form(t).to_hex(),
        square_order: order,
        complete: plan.complete,
        rule: m.rule,
        strategy: m.strategy,
        ratio: m.ratio,
        symmetry: m.symmetry,
        tasks: plan.task_count(),
        orbits: plan
            .orbits
            .iter()
            .map(|o| OrbitInfo {
                size: o.members.len(),
                leader: o.leader.iter().collect(),
            })
            .collect(),
    }
}

fn build(t: &Template, order: Vec<usize>, settings: &Manifest, node_limit: Option<u64>) -> (RefinePlan, Manifest) {
    let opts = options(settings.complete, settings.rule, settings.strategy, settings.ratio, settings.symmetry, node_limit);
    let plan = RefinePlan::new(t, &opts);
    let manifest = manifest_of(t, order, settings, &plan);
    (plan, manifest)
}

fn write_atomic(path: &Path, data: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, data).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))
}

fn parse_range(s: &str, tasks: usize) -> Result<Range<usize>> {
    let (a, b) = s.split_once("..").context("orbit range must look like A..B")?;
    let a: usize = if a.is_empty() { 0 } else { a.parse().context("bad range start")? };
    let b: usize = if b.is_empty() { tasks } else { b.parse().context("bad range end")? };
    if a > b || b > tasks {
        bail!("orbit range {a}..{b} is outside 0..{tasks}");
    }
    Ok(a..b)
}

fn read_bitmap(dir: &Path, tasks: usize) -> Result<Vec<bool>> {
    let path = dir.join("done.txt");
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let text = text.trim();
    if text.len() != tasks || text.chars().any(|c| c != '0' && c != '1') {
        bail!("corrupt checkpoint in {}: expected {tasks} task flags, found bitmap `{text}`", dir.display());
    }
    Ok(text.chars().map(|c| c == '1').collect())
}

fn bitmap_text(done: &[bool]) -> String {
    let mut s: String = done.iter().map(|&d| if d { '1' } else { '0' }).collect();
    s.push('\n');
    s
}

pub fn cmd_refine(a: RefineArgs) -> Result<u8> {
    let (dir, plan, manifest, mut done) = match (&a.resume, &a.out) {
        (Some(dir), _) => {
            let path = dir.join("manifest.json");
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let stored: Manifest = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let t: Template = stored.template.parse().context("parsing the recorded template")?;
            let (plan, manifest) = build(&t, stored.square_order.clone(), &stored, a.node_limit);
            let done = read_bitmap(dir, manifest.tasks);
            if manifest != stored {
                let bitmap = fs::read_to_string(dir.join("done.txt")).unwrap_or_default();
                bail!(
                    "corrupt checkpoint in {}: the recorded plan does not match a rebuilt one; bitmap `{}`",
                    dir.display(),
                    bitmap.trim()
                );
            }
            (dir.clone(), plan, manifest, done?)
        }
        (None, Some(dir)) => {
            if dir.join("manifest.json").exists() {
                bail!("{} already holds a run; use --resume", dir.display());
            }
            let path = a.template.as_ref().expect("required by clap");
            let t0 = crate::read_template(path)?;
            let m = t0.square_count();
            let order: Vec<usize> = if a.preferred_order {
                search::preferred_square_order(&t0)
            } else {
                (0..m).collect()
            };
            let t = t0.reorder_squares(&order);
            let complete = a.complete.unwrap_or(if t.chi() { m.saturating_sub(1) } else { m });
            let settings = Manifest {
                tool: String::new(),
                version: String::new(),
                template: String::new(),
                canonical: String::new(),
                square_order: Vec::new(),
                complete,
                rule: a.rule,
                strategy: a.strategy,
                ratio: a.ratio,
                symmetry: a.symmetry,
                tasks: 0,
                orbits: Vec::new(),
            };
            let (plan, manifest) = build(&t, order, &settings, a.node_limit);
            fs::create_dir_all(dir.join("tasks")).with_context(|| format!("creating {}", dir.display()))?;
            write_atomic(&dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
            let done = vec![false; manifest.tasks];
            write_atomic(&dir.join("done.txt"), bitmap_text(&done).as_bytes())?;
            (dir.clone(), plan, manifest, done)
        }
        (None, None) => bail!("give --out DIR for a new run or --resume DIR"),
    };

    let range = match &a.orbits {
        Some(s) => parse_range(s, manifest.tasks)?,
        None => 0..manifest.tasks,
    };
    let pending: Vec<usize> = range.filter(|&i| !done[i]).collect();
    eprintln!(
        "{} tasks, {} already done, running {}",
        manifest.tasks,
        done.iter().filter(|&&d| d).count(),
        pending.len()
    );

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .context("starting worker pool")?;
    let state = Mutex::new((std::mem::take(&mut done), String::new()));
    let finished = AtomicUsize::new(0);
    let total = pending.len();
    pool.install(|| {
        pending.par_iter().try_for_each(|&i| -> Result<()> {
            let mut cat = SpeciesCatalogue::new();
            let mut raw = 0u64;
            let mut err = None;
            let stats = plan.run_tasks(i..i + 1, &mut |_, p| {
                raw += 1;
                if err.is_none() {
                    if let Err(e) = plan.mols_of(p).and_then(|m| cat.insert(&m)) {
                        err = Some(e);
                    }
                }
            });
            if let Some(e) = err {
                return Err(e.into());
            }
            if stats.truncated {
                eprintln!("task {i} stopped at the node limit; left pending");
                return Ok(());
            }
            if !cat.is_empty() {
                cat.write_dir(&dir.join("tasks").join(i.to_string()))?;
            }
            let mut guard = state.lock().expect("worker panicked");
            guard.0[i] = true;
            guard.1.push_str(&format!("{i}\t{}\t{}\t{raw}\n", cat.len(), stats.nodes));
            write_atomic(&dir.join("done.txt"), bitmap_text(&guard.0).as_bytes())?;
            let log = dir.join("tasks.tsv");
            let mut existing = fs::read_to_string(&log).unwrap_or_else(|_| "task\tspecies\tnodes\traw\n".into());
            existing.push_str(&guard.1);
            guard.1.clear();
            write_atomic(&log, existing.as_bytes())?;
            drop(guard);
            let f = finished.fetch_add(1, Ordering::Relaxed) + 1;
            if !cat.is_empty() || f == total || f.is_multiple_of(100) {
                eprintln!("task {i} done ({f}/{total}): {} species, {} nodes", cat.len(), stats.nodes);
            }
            Ok(())
        })
    })?;
    let done = state.into_inner().expect("worker panicked").0;

    let mut merged = SpeciesCatalogue::new();
    for (i, &d) in done.iter().enumerate() {
        let task_dir = dir.join("tasks").join(i.to_string());
        if d && task_dir.exists() {
            merged.merge(&SpeciesCatalogue::read_dir(&task_dir)?);
        }
    }
    merged.write_dir(&dir.join("catalogue"))?;
    let complete = done.iter().all(|&d| d);
    println!(
        "{} of {} tasks done; {} species{}",
        done.iter().filter(|&&d| d).count(),
        done.len(),
        merged.len(),
        if complete { "" } else { " so far" }
    );
    Ok(if complete && merged.is_empty() { crate::EMPTY } else { 0 })
}
