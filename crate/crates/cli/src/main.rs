use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use netrel::classify::{self, SpeciesCatalogue, TabulateBy};
use netrel::gf2;
use netrel::netcore::{self, MolsList};
use netrel::templates::{self, Template};
use netrel::typecounts::{self, Enumerator};

mod refine;

#[derive(Parser)]
#[command(name = "netrel", version, about = "GF(2) relations on nets of even order")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Point-type counts for a relation type.
    Typecounts(TypecountsArgs),
    /// Generate a template catalogue, or decode one Q4 encoding.
    GenTemplates(GenArgs),
    /// Search for nets refining a template.
    Refine(refine::RefineArgs),
    /// Screen MOLS files into a species catalogue.
    Classify(ClassifyArgs),
    /// Report relations, transversals and extendability of a MOLS file.
    Verify(VerifyArgs),
    /// Count catalogue species by dimension or transversals.
    Tabulate(TabulateArgs),
    /// Try to extend a pair of MOLS to a triple.
    Extend(ExtendArgs),
}

/// Exit status for a run that succeeded with an empty or infeasible result.
const EMPTY: u8 = 2;

/// Comma-separated class weights.
#[derive(Clone, Debug)]
struct Weights(Vec<usize>);

impl std::str::FromStr for Weights {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| format!("bad weight `{x}`")))
            .collect::<Result<_, _>>()
            .map(Weights)
    }
}

fn read_mols(path: &Path) -> Result<MolsList> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse().with_context(|| format!("parsing {}", path.display()))
}

fn read_template(path: &Path) -> Result<Template> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let t: Template = text.parse().with_context(|| format!("parsing {}", path.display()))?;
    templates::validate_template(&t).with_context(|| format!("validating {}", path.display()))?;
    Ok(t)
}

#[derive(Args)]
struct TypecountsArgs {
    /// Net order.
    #[arg(short = 'n', long = "order", default_value_t = 10)]
    n: usize,
    /// Class count; taken from --type when omitted.
    #[arg(short = 'k')]
    k: Option<usize>,
    /// Comma-separated class weights.
    #[arg(long = "type", required_unless_present = "table")]
    lambdas: Option<Weights>,
    /// Odd relation.
    #[arg(long)]
    odd: bool,
    /// Class whose parity is flipped in the odd closed form (4 and 5 classes).
    #[arg(long)]
    flip_index: Option<usize>,
    /// Print the solution counts for all seven 6-class types of order 10.
    #[arg(long, conflicts_with = "lambdas")]
    table: bool,
}

fn parallel_count(e: &Enumerator) -> u64 {
    e.first_values().par_iter().map(|&v| e.count_with_first(v)).sum()
}

fn cmd_typecounts(a: TypecountsArgs) -> Result<u8> {
    if a.table {
        println!("type\tsolutions\twith_bound");
        for entry in typecounts::TABLE_TYPES {
            let row = typecounts::table_row(entry, &parallel_count)?;
            let mark = if row.eliminated_externally { "*" } else { "" };
            println!("{}\t{}\t{}{mark}", row.label, row.without_bound, row.with_bound);
        }
        return Ok(0);
    }
    let lambdas = a.lambdas.expect("required by clap").0;
    if let Some(k) = a.k {
        if k != lambdas.len() {
            bail!("-k {k} does not match {} weights", lambdas.len());
        }
    }
    match lambdas.len() {
        4 | 5 => {
            let v = match (a.odd, a.flip_index) {
                (true, f) => typecounts::odd_variant(a.n, &lambdas, f.unwrap_or(lambdas.len() - 1)),
                (false, None) if lambdas.len() == 4 => typecounts::counts_4net(a.n, &lambdas),
                (false, None) => typecounts::counts_5net(a.n, &lambdas),
                (false, Some(_)) => bail!("--flip-index needs --odd"),
            };
            let v = match v {
                Err(e @ (netrel::Error::InconsistentWeights(_) | netrel::Error::NonIntegral { .. })) => {
                    println!("infeasible: {e}");
                    return Ok(EMPTY);
                }
                v => v?,
            };
            println!("type\tcount");
            for (b, t) in &v.entries {
                println!("{}\t{t}", typecounts::type_string(*b, v.k));
            }
            let neg = v.negative_types();
            if !neg.is_empty() {
                let w: Vec<String> = neg
                    .iter()
                    .map(|&b| format!("t_{}={}", typecounts::type_string(b, v.k), v.get(b).unwrap_or(0)))
                    .collect();
                println!("infeasible: {}", w.join(", "));
                return Ok(EMPTY);
            }
            Ok(0)
        }
        _ => {
            let sys = typecounts::build_system_with_parity(a.n, &lambdas, a.odd)?;
            let without = parallel_count(&Enumerator::new(&sys, false));
            let with = parallel_count(&Enumerator::new(&sys, true));
            println!("solutions\twith_bound");
            println!("{without}\t{with}");
            Ok(if without == 0 { EMPTY } else { 0 })
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Comma-separated class weights: 4,4,4,4 or 4,4,2,2,2 (with --odd).
    #[arg(long = "type", required_unless_present = "decode_q4")]
    lambdas: Option<Weights>,
    #[arg(long)]
    odd: bool,
    #[arg(long, default_value_t = 10)]
    order: usize,
    /// Print the template of one Q4 encoding (six groups of six digits).
    #[arg(long, conflicts_with = "lambdas")]
    decode_q4: Option<String>,
    /// Output directory for template files and index.tsv.
    #[arg(long, short, required_unless_present = "decode_q4")]
    out: Option<PathBuf>,
}

fn cmd_gen_templates(a: GenArgs) -> Result<u8> {
    if let Some(code) = a.decode_q4 {
        let t = templates::template_from_encoding(&code)?;
        match a.out {
            Some(path) => fs::write(&path, t.to_text()).with_context(|| format!("writing {}", path.display()))?,
            None => print!("{}", t.to_text()),
        }
        return Ok(0);
    }
    let lambdas = a.lambdas.expect("required by clap").0;
    if a.order != 10 {
        bail!("template generation is implemented for order 10 only");
    }
    let ts = match (lambdas.as_slice(), a.odd) {
        ([4, 4, 4, 4], false) => generate_44_parallel(),
        ([4, 4, 2, 2, 2], true) => templates::generate_44222_odd(),
        _ => bail!("unsupported template type {lambdas:?} (odd: {}); supported: 4,4,4,4 and --odd 4,4,2,2,2", a.odd),
    };
    let out = a.out.expect("required by clap");
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let mut index = String::from("file\taut_order\tsymmetry\tcanonical\n");
    let width = ts.len().to_string().len().max(4);
    for (i, t) in ts.iter().enumerate() {
        let name = format!("t{:0width$}.template", i + 1);
        fs::write(out.join(&name), t.to_text()).with_context(|| format!("writing {name}"))?;
        let aut = templates::automorphism_group(t);
        let canon = templates::canonical_form(t).to_hex();
        index.push_str(&format!("{name}\t{}\t{}\t{canon}\n", aut.order, aut.symmetry_class()));
    }
    fs::write(out.join("index.tsv"), index).context("writing index.tsv")?;
    println!("{} templates written to {}", ts.len(), out.display());
    Ok(if ts.is_empty() { EMPTY } else { 0 })
}

fn generate_44_parallel() -> Vec<Template> {
    let partials = templates::generate_44_partials();
    let merged = partials
        .par_iter()
        .map(templates::complete_44_partial)
        .reduce(Default::default, |mut a, mut b| {
            a.append(&mut b);
            a
        });
    merged.into_values().collect()
}

#[derive(Args)]
struct ClassifyArgs {
    /// MOLS files, or directories searched for *.mols files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Catalogue directory; merged into when it exists.
    #[arg(long, short)]
    out: PathBuf,
}

fn mols_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "mols"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn cmd_classify(a: ClassifyArgs) -> Result<u8> {
    let files = mols_files(&a.inputs)?;
    let lists: Vec<MolsList> = files.iter().map(|f| read_mols(f)).collect::<Result<_>>()?;
    let fresh = lists
        .par_iter()
        .map(|m| {
            let mut c = SpeciesCatalogue::new();
            c.insert(m).map(|_| c)
        })
        .try_reduce(SpeciesCatalogue::new, |mut x, y| {
            x.merge(&y);
            Ok(x)
        })?;
    let mut cat = if a.out.join("invariants.tsv").exists() {
        SpeciesCatalogue::read_dir(&a.out)?
    } else {
        SpeciesCatalogue::new()
    };
    let before = cat.len();
    cat.merge(&fresh);
    cat.write_dir(&a.out)?;
    println!(
        "{} inputs, {} species, {} new, catalogue size {}",
        lists.len(),
        fresh.len(),
        cat.len() - before,
        cat.len()
    );
    Ok(if cat.is_empty() { EMPTY } else { 0 })
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    /// Template to compare odd-relation templates against.
    #[arg(long)]
    template: Option<PathBuf>,
    /// Class weights of the odd relation looked for on the MOLS plus two
    /// disjoint common transversals (transversal class last).
    #[arg(long, default_value = "4,4,2,2,2")]
    odd_type: Weights,
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    let m = read_mols(&a.file)?;
    let net = netcore::mols_to_net(&m)?;
    let profile = classify::invariant_profile(&m)?;
    println!("order\t{}", m.order());
    println!("squares\t{}", m.len());
    println!("species_key\t{}", classify::species_key(&m));
    println!("dimension\t{}", profile.dimension);
    println!("nontrivial_relations\t{}", gf2::nontrivial_relation_count(&net));
    for t in &profile.relation_types {
        println!("relation_type\t{t}");
    }
    println!("transversals\t{}", profile.transversals);
    println!("max_disjoint\t{}", profile.max_disjoint);
    if m.len() == 2 {
        let ext = netcore::extend_to_triple(&m).is_some();
        println!("triple_extendable\t{}", if ext { "yes" } else { "no" });
    }
    if m.len() + 3 == a.odd_type.0.len() {
        let found = classify::transversal_odd_templates(&m, &a.odd_type.0)?;
        println!("odd_relation_templates\t{}", found.len());
        for t in &found {
            let aut = templates::automorphism_group(t);
            println!("odd_template\t|Aut|={}\t{}", aut.order, aut.symmetry_class());
        }
        if let Some(path) = &a.template {
            let target = read_template(path)?;
            let hit = found.iter().any(|t| templates::are_isomorphic(t, &target));
            println!("matches_template\t{}", if hit { "yes" } else { "no" });
        }
    }
    Ok(0)
}

#[derive(Clone, Copy, ValueEnum)]
enum By {
    Dimension,
    Transversals,
}

#[derive(Args)]
struct TabulateArgs {
    /// Catalogue directory.
    catalogue: PathBuf,
    #[arg(long, value_enum, default_value = "transversals")]
    by: By,
}

fn cmd_tabulate(a: TabulateArgs) -> Result<u8> {
    let cat = SpeciesCatalogue::read_dir(&a.catalogue)?;
    let (by, head) = match a.by {
        By::Dimension => (TabulateBy::Dimension, "dimension"),
        By::Transversals => (TabulateBy::Transversals, "max_disjoint\ttransversals"),
    };
    println!("{head}\tspecies");
    for (key, count) in classify::tabulate(&cat, by) {
        let key: Vec<String> = key.iter().map(|x| x.to_string()).collect();
        println!("{}\t{count}", key.join("\t"));
    }
    Ok(if cat.is_empty() { EMPTY } else { 0 })
}

#[derive(Args)]
struct ExtendArgs {
    file: PathBuf,
}

fn cmd_extend(a: ExtendArgs) -> Result<u8> {
    let m = read_mols(&a.file)?;
    match netcore::extend_to_triple(&m) {
        Some(sq) => {
            let mut squares = m.squares().to_vec();
            squares.push(sq);
            print!("{}", MolsList::new(m.order(), squares)?.to_text());
            Ok(0)
        }
        None => {
            println!("not extendable");
            Ok(EMPTY)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Typecounts(a) => cmd_typecounts(a),
        Command::GenTemplates(a) => cmd_gen_templates(a),
        Command::Refine(a) => refine::cmd_refine(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Tabulate(a) => cmd_tabulate(a),
        Command::Extend(a) => cmd_extend(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
