//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any fails.

#![allow(clippy::excessive_precision)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;
use std::time::{Duration, Instant};

use bibcoupling::indicators::price_index;
use bibcoupling::ingest::{parse_reference_string, write_jsonl, PeriodSpec, RawReference};
use bibcoupling::network::{
    bm25_directed, bm25_pair, build_author_coupling, build_idf, build_text_coupling,
    cosine_coupling_weight, tokenize, Bm25Params, CoupledGraph, Edge, GraphContext, NodeKind,
    TokenProfile, WeightKind,
};
use bibcoupling::percolation::{connectivity_profile, cosine_grid, quantile_grid};
use bibcoupling::pipeline::{run_pipeline_with_threads, PipelineConfig};
use bibcoupling::resolve::{
    jaro_winkler, references_match, resolve_references, CitedWork, MatchRuleConfig, ResolvedArticle,
};
use bibcoupling::synth::{generate, SynthConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn random_string(rng: &mut ChaCha8Rng, alphabet: &[char], max: usize) -> String {
    let len = rng.gen_range(0..=max);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

fn string_metrics() -> Outcome {
    let start = Instant::now();
    let m = jaro_winkler::<f64>("martha", "marhta");
    check((m - 0.9611).abs() <= 1e-4, || {
        format!("martha/marhta = {m}")
    })?;
    check(jaro_winkler::<f64>("kuhn", "kuhn") == 1.0, || {
        "identity".into()
    })?;
    check(jaro_winkler::<f64>("abc", "xyz") == 0.0, || {
        "disjoint".into()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let alphabet: Vec<char> = "abcdeéxyz ".chars().collect();
    for _ in 0..10_000 {
        let a = random_string(&mut rng, &alphabet, 12);
        let b = random_string(&mut rng, &alphabet, 12);
        let ab = jaro_winkler::<f64>(&a, &b);
        check((0.0..=1.0).contains(&ab), || {
            format!("{a:?}/{b:?} out of bounds: {ab}")
        })?;
        check(ab == jaro_winkler::<f64>(&b, &a), || {
            format!("{a:?}/{b:?} asymmetric")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "martha/marhta = {m:.4}, 10000 pairs in {:.2?}",
        start.elapsed()
    ))
}

fn partition_by(
    refs: &[RawReference],
    cluster: impl Fn(usize) -> usize,
) -> BTreeSet<BTreeSet<String>> {
    let mut parts: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, r) in refs.iter().enumerate() {
        parts.entry(cluster(i)).or_default().insert(r.member_key());
    }
    parts.into_values().collect()
}

fn resolution_oracle() -> Outcome {
    let start = Instant::now();
    let cfg = MatchRuleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut total = 0;
    for corpus in 0..60 {
        let n = rng.gen_range(1..=200);
        let refs: Vec<RawReference> = (0..n)
            .filter_map(|i| {
                let author = format!(
                    "{} {}",
                    random_string(&mut rng, &['a', 'b'], 5),
                    if rng.gen_bool(0.5) { 'a' } else { 'b' }
                );
                let title = format!(
                    "{} {}",
                    random_string(&mut rng, &['a', 'b'], 5),
                    random_string(&mut rng, &['a', 'b', 'c'], 6)
                );
                let year = rng.gen_range(1990..1993);
                parse_reference_string(&format!("r{i}"), &format!("{author}, {year}, {title}")).ok()
            })
            .collect();
        total += refs.len();
        let res = resolve_references(&refs, &cfg);
        let blocked = partition_by(&refs, |i| res.cluster_index(&refs[i].member_key()).unwrap());

        let mut comp = vec![usize::MAX; refs.len()];
        for s in 0..refs.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in 0..refs.len() {
                    if comp[v] == usize::MAX && references_match(&refs[u], &refs[v], &cfg) {
                        comp[v] = s;
                        queue.push_back(v);
                    }
                }
            }
        }
        let naive = partition_by(&refs, |i| comp[i]);
        check(blocked == naive, || {
            format!("corpus {corpus}: blocked clustering differs from closure")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "60 corpora, {total} variants, identical partitions in {:.2?}",
        start.elapsed()
    ))
}

fn coupling_weights() -> Outcome {
    check(
        cosine_coupling_weight::<f64, _>(&['a', 'b', 'c'], &['b', 'c', 'd']) == 2.0 / 3.0,
        || "2/3 case".into(),
    )?;
    let article = ResolvedArticle {
        id: "a".into(),
        specialism: "s".into(),
        year: 2000,
        author_count: 2,
        authors: vec![0, 1],
        cited: [3, 5, 8]
            .iter()
            .map(|&cluster| CitedWork {
                cluster,
                year: 1990,
            })
            .collect(),
    };
    let ctx = GraphContext::new("s", PeriodSpec::new("p", 2000, 2009));
    let g = build_author_coupling::<f64>(&[&article], &["x".into(), "y".into()], ctx);
    check(g.edges.len() == 1 && g.edges[0].weight == 1.0, || {
        "co-author weight is not one".into()
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let set = |rng: &mut ChaCha8Rng| -> Vec<u32> {
        let s: BTreeSet<u32> = (0..rng.gen_range(0..15))
            .map(|_| rng.gen_range(0..30))
            .collect();
        s.into_iter().collect()
    };
    for _ in 0..10_000 {
        let (a, b) = (set(&mut rng), set(&mut rng));
        let w = cosine_coupling_weight::<f64, _>(&a, &b);
        check((0.0..=1.0).contains(&w), || format!("{a:?}/{b:?}: {w}"))?;
        check(w == cosine_coupling_weight::<f64, _>(&b, &a), || {
            format!("{a:?}/{b:?} asymmetric")
        })?;
        let mut diluted = a.clone();
        diluted.push(1000);
        let d = cosine_coupling_weight::<f64, _>(&diluted, &b);
        check(if w > 0.0 { d < w } else { d == 0.0 }, || {
            format!("{a:?}/{b:?}: dilution {w} -> {d}")
        })?;
    }
    Ok("2/3 and weight-one cases exact, 10000 random pairs".into())
}

fn bm25_golden() -> Outcome {
    let params = Bm25Params::<f64>::default();
    check(params.k1 == 2.0 && params.b == 0.75, || {
        "default parameters".into()
    })?;
    let profiles = |docs: &[&str]| -> Vec<TokenProfile> {
        docs.iter()
            .enumerate()
            .map(|(i, d)| tokenize(&i.to_string(), d, "").unwrap())
            .collect()
    };
    let rel = |a: f64, b: f64| {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    };

    // Toy corpus: the shared tokens alpha and gamma have IDF ln(1.5/2.5) < 0
    // and are discarded, so every directed and symmetrized score is zero.
    let toy = profiles(&["alpha beta", "alpha gamma", "delta gamma"]);
    let idf = build_idf::<f64>(&toy).unwrap();
    check(idf.idf.keys().eq(["beta", "delta"].iter()), || {
        format!("toy idf tokens {:?}", idf.idf.keys())
    })?;
    check(rel(idf.idf["beta"], 0.510825623765990683) <= 1e-9, || {
        "toy idf value".into()
    })?;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                check(
                    bm25_directed(&toy[i], &toy[j], &idf, &params) == 0.0,
                    || format!("toy s({i},{j}) != 0"),
                )?;
            }
        }
    }

    // Five documents of lengths 4,4,4,3,5 with repeated tokens; reference
    // values from a 30-digit evaluation of the formula.
    let docs = profiles(&[
        "graph network graph theory",
        "network theory of citation",
        "citation graph analysis analysis",
        "text similarity ranking",
        "ranking of text documents network",
    ]);
    let gold: [(usize, usize, f64, f64, f64); 5] = [
        (
            0,
            1,
            0.33647223662121293050,
            0.33647223662121293050,
            0.33647223662121293050,
        ),
        (
            0,
            2,
            0.33647223662121293050,
            0.50470835493181939575,
            0.42059029577651616313,
        ),
        (
            1,
            2,
            0.33647223662121293050,
            0.33647223662121293050,
            0.33647223662121293050,
        ),
        (
            1,
            4,
            0.29908643255218927155,
            0.33647223662121293050,
            0.31777933458670110103,
        ),
        (
            3,
            4,
            0.59817286510437854311,
            0.76907939799134384115,
            0.68362613154786119213,
        ),
    ];
    let idf = build_idf::<f64>(&docs).unwrap();
    let mut worst: f64 = 0.0;
    for (i, j, sij, sji, w) in gold {
        let got = [
            bm25_directed(&docs[i], &docs[j], &idf, &params),
            bm25_directed(&docs[j], &docs[i], &idf, &params),
            bm25_pair(&docs[i], &docs[j], &idf, &params),
            bm25_pair(&docs[j], &docs[i], &idf, &params),
        ];
        for (g, want) in got.iter().zip([sij, sji, w, w]) {
            worst = worst.max(rel(*g, want));
        }
    }
    check(worst <= 1e-9, || format!("relative error {worst:e}"))?;
    let refs: Vec<&TokenProfile> = docs.iter().collect();
    let ctx = GraphContext::new("s", PeriodSpec::new("p", 2000, 2009));
    let g = build_text_coupling(&refs, &idf, &params, ctx);
    check(g.edges.len() == 5, || {
        format!("{} edges, expected 5", g.edges.len())
    })?;
    Ok(format!(
        "toy corpus all zero, five-document max relative error {worst:.1e}"
    ))
}

fn bfs_count(n: usize, edges: &[Edge<f64>], t: f64) -> (usize, usize) {
    let mut adj = vec![Vec::new(); n];
    for e in edges.iter().filter(|e| e.weight >= t) {
        adj[e.i as usize].push(e.j as usize);
        adj[e.j as usize].push(e.i as usize);
    }
    let mut seen = vec![false; n];
    let (mut count, mut giant) = (0, 0);
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        giant = giant.max(size);
    }
    (count, giant)
}

fn graph(n: usize, edges: Vec<Edge<f64>>) -> CoupledGraph<f64> {
    CoupledGraph {
        node_kind: NodeKind::Article,
        weight_kind: WeightKind::CosineOverlap,
        nodes: (0..n).map(|i| i.to_string()).collect(),
        edges,
        context: GraphContext::new("s", PeriodSpec::new("p", 2000, 2009)),
    }
}

fn percolation_oracle() -> Outcome {
    let start = Instant::now();
    let triangle = graph(
        3,
        vec![
            Edge {
                i: 0,
                j: 1,
                weight: 0.2,
            },
            Edge {
                i: 0,
                j: 2,
                weight: 0.5,
            },
            Edge {
                i: 1,
                j: 2,
                weight: 0.9,
            },
        ],
    );
    let p = connectivity_profile(&triangle, &[0.1, 0.3, 0.6, 1.0]).unwrap();
    check(p.c_values == [1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], || {
        format!("triangle {:?}", p.c_values)
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = cosine_grid::<f64>();
    for k in 0..100 {
        let n = rng.gen_range(1..=100);
        let mut pairs = BTreeMap::new();
        for _ in 0..rng.gen_range(0..3 * n) {
            let (a, b) = (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32));
            if a != b {
                pairs.insert((a.min(b), a.max(b)), rng.gen_range(1..=100) as f64 / 100.0);
            }
        }
        let g = graph(
            n,
            pairs
                .into_iter()
                .map(|((i, j), weight)| Edge { i, j, weight })
                .collect(),
        );
        let p = connectivity_profile(&g, &grid).unwrap();
        p.check_monotone().map_err(|e| format!("graph {k}: {e}"))?;
        for (idx, &t) in grid.iter().enumerate() {
            let (count, giant) = bfs_count(n, &g.edges, t);
            check(p.components[idx] == count, || {
                format!("graph {k}, t = {t}: {} vs {count}", p.components[idx])
            })?;
            check(p.giant_fractions[idx] == giant as f64 / n as f64, || {
                format!("graph {k}, t = {t}: giant")
            })?;
        }
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "triangle exact, 100 graphs x 101 thresholds match BFS in {:.2?}",
        start.elapsed()
    ))
}

fn period_file(dir: &Path, periods: &[PeriodSpec]) -> std::path::PathBuf {
    let path = dir.join("periods.json");
    std::fs::write(&path, serde_json::to_vec(periods).unwrap()).unwrap();
    path
}

fn write_corpus(dir: &Path, cfg: &SynthConfig) -> std::path::PathBuf {
    let path = dir.join("corpus.jsonl");
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &generate(cfg).unwrap()).unwrap();
    std::fs::write(&path, buf).unwrap();
    path
}

/// c at t = 0.1 per period, read back from the aggregate curve in the bundle.
fn c_at_one_tenth(bundle: &Path) -> Vec<f64> {
    let text =
        std::fs::read_to_string(bundle.join("percolation/article-cosine.aggregate.csv")).unwrap();
    text.lines()
        .skip(1)
        .filter_map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[1] == "0.1").then(|| cols[3].parse().unwrap())
        })
        .collect()
}

fn fragmentation_trend() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    for seed in 0..10u64 {
        let dir = tempfile::tempdir().unwrap();
        let synth = SynthConfig::fragmentation(seed);
        let cfg = PipelineConfig {
            input: vec![write_corpus(dir.path(), &synth)],
            periods: Some(period_file(dir.path(), &synth.periods)),
            out: dir.path().join("bundle"),
            ..PipelineConfig::default()
        };
        run_pipeline_with_threads(&cfg, None).map_err(|e| e.to_string())?;
        let c = c_at_one_tenth(&cfg.out);
        check(c.len() == 4 && c.windows(2).all(|w| w[0] < w[1]), || {
            format!("seed {seed}: c(0.1) = {c:?}")
        })?;
        lines.push(format!("{:.3}/{:.3}/{:.3}/{:.3}", c[0], c[1], c[2], c[3]));
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "10 seeds strictly increasing in {:.2?}; seed 0 c(0.1) = {}",
        start.elapsed(),
        lines[0]
    ))
}

fn price_index_cases() -> Outcome {
    let article = |year: i32, cited: &[i32]| ResolvedArticle {
        id: "a".into(),
        specialism: "s".into(),
        year,
        author_count: 1,
        authors: vec![0],
        cited: cited
            .iter()
            .enumerate()
            .map(|(c, &year)| CitedWork {
                cluster: c as u32,
                year,
            })
            .collect(),
    };
    let value = |a: &ResolvedArticle| price_index::<f64>(&[a], 10).value;
    check(
        value(&article(2000, &[1995, 1999, 1980])) == Some(2.0 / 3.0),
        || "2/3 case".into(),
    )?;
    check(value(&article(2000, &[2000, 2000])) == Some(1.0), || {
        "1.0 case".into()
    })?;
    check(value(&article(2000, &[1950, 1980])) == Some(0.0), || {
        "0.0 case".into()
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..1000 {
        let slice: Vec<ResolvedArticle> = (0..rng.gen_range(0..10))
            .map(|_| {
                let year = rng.gen_range(1950..2020);
                let cited: Vec<i32> = (0..rng.gen_range(0..8))
                    .map(|_| rng.gen_range(1900..2025))
                    .collect();
                article(year, &cited)
            })
            .collect();
        let shift = rng.gen_range(-1000..1000);
        let moved: Vec<ResolvedArticle> = slice
            .iter()
            .map(|a| {
                let mut a = a.clone();
                a.year += shift;
                a.cited.iter_mut().for_each(|c| c.year += shift);
                a
            })
            .collect();
        let before = price_index::<f64>(&slice.iter().collect::<Vec<_>>(), 10);
        let after = price_index::<f64>(&moved.iter().collect::<Vec<_>>(), 10);
        check(before == after, || {
            format!("trial {trial}: shift {shift} changed the index")
        })?;
    }
    Ok("golden cases exact, 1000 random translations invariant".into())
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                files.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    files
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let synth = SynthConfig::fragmentation(42);
    let base = PipelineConfig {
        input: vec![write_corpus(dir.path(), &synth)],
        periods: Some(period_file(dir.path(), &synth.periods)),
        ..PipelineConfig::default()
    };
    let one = PipelineConfig {
        out: dir.path().join("one"),
        ..base.clone()
    };
    let many = PipelineConfig {
        out: dir.path().join("many"),
        ..base
    };
    let a = run_pipeline_with_threads(&one, Some(1)).map_err(|e| e.to_string())?;
    let b = run_pipeline_with_threads(&many, Some(8)).map_err(|e| e.to_string())?;
    let (ta, tb) = (read_tree(&one.out), read_tree(&many.out));
    check(ta == tb, || "bundles differ between 1 and 8 threads".into())?;
    check(a.manifest_sha256 == b.manifest_sha256, || {
        "manifest hashes differ".into()
    })?;
    Ok(format!(
        "{} files byte-identical with 1 and 8 threads",
        ta.len()
    ))
}

fn scale() -> Outcome {
    let start = Instant::now();
    let mut synth = SynthConfig::fragmentation(9);
    synth.periods.truncate(1);
    synth.articles_per_period = 2000;
    synth.refs_per_article = vec![20];
    synth.shared_pool_size = vec![1600];
    synth.shared_draw_fraction = vec![0.8];
    synth.abstract_length = 150;
    let records = generate(&synth).map_err(|e| e.to_string())?;
    let profiles: Vec<TokenProfile> = records
        .iter()
        .filter_map(|r| tokenize(&r.id, &r.title, r.abstract_text.as_deref()?))
        .collect();
    check(profiles.len() == 2000, || {
        format!("{} abstracts", profiles.len())
    })?;
    let idf = build_idf::<f64>(&profiles).map_err(|e| e.to_string())?;
    let refs: Vec<&TokenProfile> = profiles.iter().collect();
    let ctx = GraphContext::new("s", synth.periods[0].clone());
    let g = build_text_coupling(&refs, &idf, &Bm25Params::default(), ctx).quantized();
    let weights: Vec<f64> = g.edges.iter().map(|e| e.weight).collect();
    let p = connectivity_profile(&g, &quantile_grid(&weights)).map_err(|e| e.to_string())?;
    p.check_monotone()?;
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "2000 abstracts, {} edges, {} thresholds in {:.2?}",
        g.edges.len(),
        p.len(),
        start.elapsed()
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("string metric correctness", string_metrics),
        ("resolution oracle", resolution_oracle),
        ("coupling weights", coupling_weights),
        ("bm25 golden corpus", bm25_golden),
        ("percolation oracle", percolation_oracle),
        ("fragmentation trend", fragmentation_trend),
        ("price index", price_index_cases),
        ("determinism", determinism),
        ("scale sanity", scale),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail})", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({detail})", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
