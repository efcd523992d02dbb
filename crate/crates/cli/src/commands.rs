use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use arir::index::{parse_trec_documents, read_text_file, IndexBuilder, RawDocument};
use arir::ranking::{rank_all, run_tag, Query, DEFAULT_TOP_K};
use arir::stoplists::{build_corpus_stoplist, combine, load_stoplist, Bundled};
use arir::treceval::{evaluate_run, parse_qrels, Qrels};
use arir::{Analyzer, Encoding, EvalReport, Index, Model, Normalizer, Provenance, RankedRun, Stoplist};

use crate::args::{
    Cli, Command, CompareArgs, EvalArgs, ExperimentArgs, IndexArgs, SearchArgs, StoplistCommand, SynthArgs,
};
use crate::compare::{compare, labels_for, Comparison, DEFAULT_BASELINE};
use crate::config::{existing, pick, require, Manifest};
use crate::error::{CliError, Result};
use crate::report::{load_ap_table, render_text, render_tsv};
use crate::runfile::{load_runs, write_runs};
use crate::synth::{generate, SynthConfig};
use crate::topics::{parse_topics, Topic};

pub fn execute<W: Write>(cli: Cli, out: &mut W) -> Result<()> {
    let manifest = match &cli.config {
        Some(path) => Manifest::load(path)?,
        None => Manifest::default(),
    };
    match cli.command {
        Command::Index(a) => cmd_index(a, &manifest, out),
        Command::Search(a) => cmd_search(a, &manifest, out),
        Command::Eval(a) => cmd_eval(a, &manifest, out),
        Command::Compare(a) => cmd_compare(a, &manifest, out),
        Command::Stoplist(c) => cmd_stoplist(c, out),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Experiment(a) => cmd_experiment(a, &manifest, out),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::file(path, e)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn encoding(flag: Option<String>, manifest: &Manifest) -> Result<Encoding> {
    match pick(flag, manifest.get("encoding").map(String::from)) {
        Some(e) => Ok(e.parse()?),
        None => Ok(Encoding::Utf8),
    }
}

/// `none`, a bundled code (`GS`, `CBS`, `CS`) or a stoplist file.
pub fn resolve_stoplist(list: &str) -> Result<Option<Stoplist>> {
    if list.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    if let Ok(b) = list.to_ascii_uppercase().parse::<Bundled>() {
        return Ok(Some(b.load()));
    }
    let path = existing(PathBuf::from(list))?;
    let name = path
        .file_stem()
        .map_or_else(|| list.to_owned(), |s| s.to_string_lossy().into_owned());
    let file = File::open(&path).map_err(io_err(&path))?;
    let list = load_stoplist(BufReader::new(file), name, Provenance::Custom).map_err(|e| CliError::file(&path, e))?;
    Ok(Some(list))
}

fn corpus_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        let p = existing(p.clone())?;
        if p.is_dir() {
            let mut inner: Vec<PathBuf> = std::fs::read_dir(&p)
                .map_err(io_err(&p))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|q| q.is_file())
                .collect();
            inner.sort();
            files.extend(inner);
        } else {
            files.push(p);
        }
    }
    Ok(files)
}

pub fn read_corpus(paths: &[PathBuf], enc: Encoding) -> Result<Vec<RawDocument>> {
    let mut docs = Vec::new();
    for path in corpus_files(paths)? {
        let text = read_text_file(&path, enc).map_err(|e| CliError::file(&path, e))?;
        let parsed = parse_trec_documents(&text).map_err(|e| CliError::file(&path, e))?;
        log::info!("{}: {} documents", path.display(), parsed.len());
        docs.extend(parsed);
    }
    Ok(docs)
}

pub fn build(
    docs: &[RawDocument],
    stoplist: Option<Stoplist>,
    keep_marks: bool,
    threads: Option<usize>,
) -> Result<Index> {
    let analyzer = Analyzer::new(Normalizer::new(!keep_marks), stoplist);
    Ok(IndexBuilder::new(analyzer).threads(threads).build(docs)?)
}

pub fn index_summary(index: &Index) -> String {
    let list = index.stoplist().map_or("none", |l| l.name());
    format!(
        "documents:  {}\ntokens:     {}\nvocabulary: {}\navgdl:      {:.4}\nremoved:    {}\nstoplist:   {list}\n",
        index.num_docs(),
        index.total_tokens(),
        index.vocabulary_size(),
        index.avgdl(),
        index.removed_tokens()
    )
}

fn cmd_index<W: Write>(a: IndexArgs, m: &Manifest, out: &mut W) -> Result<()> {
    let corpus = if a.corpus.is_empty() {
        m.paths("corpus")
    } else {
        a.corpus
    };
    if corpus.is_empty() {
        return Err(CliError::usage("missing required option --corpus"));
    }
    let output = require(pick(a.output, m.path("output")), "output")?;
    let enc = encoding(a.encoding, m)?;
    let list =
        resolve_stoplist(&pick(a.stoplist, m.get("stoplist").map(String::from)).unwrap_or_else(|| "none".into()))?;
    let threads = pick(a.threads, m.parsed("threads")?);
    let docs = read_corpus(&corpus, enc)?;
    let index = build(&docs, list, a.keep_marks, threads)?;
    index.save(&output).map_err(|e| CliError::file(&output, e))?;
    write!(out, "{}", index_summary(&index)).map_err(io_err(Path::new("<stdout>")))?;
    Ok(())
}

fn model_from(code: &str, a: &SearchArgs, m: &Manifest) -> Result<Model> {
    let mut model = Model::from_code(&code.to_ascii_uppercase())?;
    match &mut model {
        Model::TfIdf(p) => {
            p.k1 = pick(a.k1, m.parsed("k1")?).unwrap_or(p.k1);
            p.b = pick(a.b, m.parsed("b")?).unwrap_or(p.b);
        }
        Model::Bm25(p) => {
            p.k1 = pick(a.k1, m.parsed("k1")?).unwrap_or(p.k1);
            p.b = pick(a.b, m.parsed("b")?).unwrap_or(p.b);
            p.k3 = pick(a.k3, m.parsed("k3")?).unwrap_or(p.k3);
        }
        Model::Kl(p) => {
            p.mu = pick(a.mu, m.parsed("mu")?).unwrap_or(p.mu);
        }
    }
    model.validate()?;
    Ok(model)
}

pub fn load_topics(path: &Path, enc: Encoding) -> Result<Vec<Topic>> {
    let text = read_text_file(path, enc).map_err(|e| CliError::file(path, e))?;
    parse_topics(&text).map_err(|e| match e {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Ranks every topic; topics left without terms after analysis produce no
/// lines and a warning.
pub fn search(
    index: &Index,
    topics: &[Topic],
    model: &Model,
    top_k: usize,
    tag: Option<&str>,
) -> Result<Vec<RankedRun>> {
    let queries: Vec<Query> = topics
        .iter()
        .map(|t| Query::from_text(t.qid.clone(), &t.query_text(), index.analyzer()))
        .collect();
    for q in queries.iter().filter(|q| q.is_empty()) {
        log::warn!("topic {}: no terms left after analysis, no results", q.qid);
    }
    let mut runs = rank_all(index, &queries, model, top_k)?;
    if let Some(tag) = tag {
        for r in &mut runs {
            r.tag = tag.to_owned();
        }
    }
    Ok(runs)
}

fn cmd_search<W: Write>(a: SearchArgs, m: &Manifest, out: &mut W) -> Result<()> {
    let index_path = existing(require(pick(a.index.clone(), m.path("index")), "index")?)?;
    let topics_path = existing(require(pick(a.topics.clone(), m.path("topics")), "topics")?)?;
    let code = require(pick(a.model.clone(), m.get("model").map(String::from)), "model")?;
    let model = model_from(&code, &a, m)?;
    let top_k = pick(a.top_k, m.parsed("top-k")?).unwrap_or(DEFAULT_TOP_K);
    let tag = pick(a.tag.clone(), m.get("tag").map(String::from));
    let enc = encoding(a.encoding.clone(), m)?;
    let output = pick(a.output.clone(), m.path("run"));

    let index = Index::load(&index_path).map_err(|e| CliError::file(&index_path, e))?;
    let topics = load_topics(&topics_path, enc)?;
    let runs = search(&index, &topics, &model, top_k, tag.as_deref())?;
    match output {
        Some(path) => write_runs(create(&path)?, &runs).map_err(io_err(&path))?,
        None => write_runs(&mut *out, &runs).map_err(io_err(Path::new("<stdout>")))?,
    }
    Ok(())
}

pub fn load_qrels(path: &Path) -> Result<Qrels> {
    let file = File::open(path).map_err(io_err(path))?;
    parse_qrels(BufReader::new(file)).map_err(|e| match e {
        arir::Error::Parse { line, message } => CliError::Format {
            path: path.to_owned(),
            line,
            message,
        },
        other => CliError::file(path, other),
    })
}

fn cmd_eval<W: Write>(a: EvalArgs, m: &Manifest, out: &mut W) -> Result<()> {
    let run_path = existing(require(pick(a.run, m.path("run")), "run")?)?;
    let qrels_path = existing(require(pick(a.qrels, m.path("qrels")), "qrels")?)?;
    let runs = load_runs(&run_path)?;
    let qrels = load_qrels(&qrels_path)?;
    let report: EvalReport = evaluate_run(&runs, &qrels).map_err(|e| CliError::file(&run_path, e))?;
    for qid in &report.excluded {
        log::warn!("query {qid}: no relevant documents, excluded from means");
    }
    let text = render_text(&report, a.per_query);
    match a.output {
        Some(path) => create(&path)?.write_all(text.as_bytes()).map_err(io_err(&path))?,
        None => out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))?,
    }
    if let Some(path) = a.tsv {
        create(&path)?
            .write_all(render_tsv(&report).as_bytes())
            .map_err(io_err(&path))?;
    }
    Ok(())
}

fn tables_text(c: &Comparison) -> String {
    format!("{}\n{}", c.friedman_table(), c.wilcoxon_table())
}

/// Writes `tables.txt`, `friedman.tsv` and `wilcoxon.tsv` into `dir`.
fn write_comparison_files(c: &Comparison, dir: &Path) -> Result<()> {
    for (name, body) in [
        ("tables.txt", tables_text(c)),
        ("friedman.tsv", c.friedman_tsv()),
        ("wilcoxon.tsv", c.wilcoxon_tsv()),
    ] {
        let path = dir.join(name);
        create(&path)?.write_all(body.as_bytes()).map_err(io_err(&path))?;
    }
    Ok(())
}

fn cmd_compare<W: Write>(a: CompareArgs, m: &Manifest, out: &mut W) -> Result<()> {
    let tables = a
        .reports
        .iter()
        .map(|p| load_ap_table(&existing(p.clone())?))
        .collect::<Result<Vec<_>>>()?;
    let paths: Vec<&Path> = a.reports.iter().map(PathBuf::as_path).collect();
    let labels = labels_for(&tables, &paths)?;
    let baseline = pick(a.baseline, m.get("baseline").map(String::from)).unwrap_or_else(|| DEFAULT_BASELINE.into());
    let c = compare(labels, &tables, &baseline)?;
    if let Some(dir) = &a.out {
        write_comparison_files(&c, dir)?;
    }
    out.write_all(tables_text(&c).as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}

fn read_word_set(path: &Path) -> Result<BTreeSet<String>> {
    let file = File::open(path).map_err(io_err(path))?;
    let list =
        load_stoplist(BufReader::new(file), "exclude", Provenance::Custom).map_err(|e| CliError::file(path, e))?;
    Ok(list.words().clone())
}

fn save_list(list: &Stoplist, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    list.write_to(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

fn required_list(list: &str) -> Result<Stoplist> {
    resolve_stoplist(list)?.ok_or_else(|| CliError::usage("`none` is not a stoplist here"))
}

fn cmd_stoplist<W: Write>(c: StoplistCommand, out: &mut W) -> Result<()> {
    let stdout = Path::new("<stdout>");
    match c {
        StoplistCommand::Build {
            index,
            cutoff,
            exclude,
            name,
            output,
        } => {
            let cutoff = cutoff.ok_or_else(|| CliError::usage("stoplist build needs --cutoff"))?;
            let index_path = existing(index)?;
            let index = Index::load(&index_path).map_err(|e| CliError::file(&index_path, e))?;
            if let Some(l) = index.stoplist() {
                log::warn!("index was built with stoplist {}; its words are not counted", l.name());
            }
            let exclusions = match exclude {
                Some(p) => read_word_set(&existing(p)?)?,
                None => BTreeSet::new(),
            };
            let freqs = index.term_frequencies();
            let list = build_corpus_stoplist(&freqs, cutoff, &exclusions).with_name(name);
            if list.is_empty() {
                log::warn!(
                    "no term occurs more than {cutoff} times (maximum {}); list is empty",
                    freqs.max_frequency()
                );
            }
            save_list(&list, &output)?;
            writeln!(out, "{}: {} words", list.name(), list.len()).map_err(io_err(stdout))?;
        }
        StoplistCommand::Combine { first, second, output } => {
            let a = required_list(&first)?;
            let b = required_list(&second)?;
            let union = combine(&a, &b);
            save_list(&union, &output)?;
            writeln!(
                out,
                "{}: {} words ({} + {} - {} shared)",
                union.name(),
                union.len(),
                a.len(),
                b.len(),
                a.intersection_len(&b)
            )
            .map_err(io_err(stdout))?;
        }
        StoplistCommand::Inspect { list, against } => {
            let a = required_list(&list)?;
            writeln!(out, "{}: {} words ({})", a.name(), a.len(), a.provenance()).map_err(io_err(stdout))?;
            if let Some(other) = against {
                let b = required_list(&other)?;
                let shared = a.intersection_len(&b);
                writeln!(out, "{}: {} words ({})", b.name(), b.len(), b.provenance()).map_err(io_err(stdout))?;
                writeln!(out, "overlap: {shared}").map_err(io_err(stdout))?;
                writeln!(out, "union:   {}", a.len() + b.len() - shared).map_err(io_err(stdout))?;
            }
        }
    }
    Ok(())
}

fn cmd_synth<W: Write>(a: SynthArgs, out: &mut W) -> Result<()> {
    if a.docs == 0 || a.queries == 0 {
        return Err(CliError::usage("--docs and --queries must be positive"));
    }
    let cfg = SynthConfig {
        docs: a.docs,
        queries: a.queries,
        seed: a.seed,
        ..SynthConfig::default()
    };
    let collection = generate(&cfg);
    let paths = collection.write_to(&a.out).map_err(io_err(&a.out))?;
    writeln!(
        out,
        "{} documents -> {}\n{} topics -> {}\n{} judgments -> {}",
        collection.docs.len(),
        paths.corpus.display(),
        collection.topics.len(),
        paths.topics.display(),
        collection.qrels.len(),
        paths.qrels.display()
    )
    .map_err(io_err(Path::new("<stdout>")))?;
    Ok(())
}

/// Inputs of a full model-by-stoplist experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub corpus: Vec<PathBuf>,
    pub topics: PathBuf,
    pub qrels: PathBuf,
    pub encoding: Encoding,
    pub top_k: usize,
    pub threads: Option<usize>,
    pub baseline: String,
    pub out: PathBuf,
}

pub const MODELS: [&str; 3] = ["TFIDF", "BM25", "KL"];
pub const LISTS: [&str; 4] = ["none", "GS", "CBS", "CS"];

/// Indexes the corpus once per stoplist, runs every model, evaluates each run
/// and compares all techniques. Writes `<TAG>.run`, `<TAG>.eval.txt`,
/// `<TAG>.eval.tsv` and the comparison tables under `out`.
pub fn run_experiment(e: &Experiment) -> Result<Comparison> {
    let docs = read_corpus(&e.corpus, e.encoding)?;
    let topics = load_topics(&e.topics, e.encoding)?;
    let qrels = load_qrels(&e.qrels)?;
    std::fs::create_dir_all(&e.out).map_err(io_err(&e.out))?;
    let mut reports_paths = Vec::new();
    for list in LISTS {
        let started = Instant::now();
        let index = build(&docs, resolve_stoplist(list)?, false, e.threads)?;
        log::info!("index with stoplist {list}: {:?}", started.elapsed());
        for code in MODELS {
            let model = Model::from_code(code)?;
            let runs = search(&index, &topics, &model, e.top_k, None)?;
            let tag = run_tag(code, index.stoplist().map(|l| l.name()));
            let run_path = e.out.join(format!("{tag}.run"));
            write_runs(create(&run_path)?, &runs).map_err(io_err(&run_path))?;
            let report: EvalReport = evaluate_run(&load_runs(&run_path)?, &qrels)?;
            let tsv_path = e.out.join(format!("{tag}.eval.tsv"));
            create(&tsv_path)?
                .write_all(render_tsv(&report).as_bytes())
                .map_err(io_err(&tsv_path))?;
            let txt_path = e.out.join(format!("{tag}.eval.txt"));
            create(&txt_path)?
                .write_all(render_text(&report, false).as_bytes())
                .map_err(io_err(&txt_path))?;
            reports_paths.push(tsv_path);
        }
    }
    let tables = reports_paths
        .iter()
        .map(|p| load_ap_table(p))
        .collect::<Result<Vec<_>>>()?;
    let paths: Vec<&Path> = reports_paths.iter().map(PathBuf::as_path).collect();
    let labels = labels_for(&tables, &paths)?;
    let c = compare(labels, &tables, &e.baseline)?;
    write_comparison_files(&c, &e.out)?;
    Ok(c)
}

fn cmd_experiment<W: Write>(a: ExperimentArgs, m: &Manifest, out: &mut W) -> Result<()> {
    let corpus = if a.corpus.is_empty() {
        m.paths("corpus")
    } else {
        a.corpus
    };
    if corpus.is_empty() {
        return Err(CliError::usage("missing required option --corpus"));
    }
    let e = Experiment {
        corpus,
        topics: existing(require(pick(a.topics, m.path("topics")), "topics")?)?,
        qrels: existing(require(pick(a.qrels, m.path("qrels")), "qrels")?)?,
        encoding: encoding(a.encoding, m)?,
        top_k: pick(a.top_k, m.parsed("top-k")?).unwrap_or(DEFAULT_TOP_K),
        threads: pick(a.threads, m.parsed("threads")?),
        baseline: pick(a.baseline, m.get("baseline").map(String::from)).unwrap_or_else(|| DEFAULT_BASELINE.into()),
        out: require(pick(a.out, m.path("out")), "out")?,
    };
    let c = run_experiment(&e)?;
    out.write_all(tables_text(&c).as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}
