//! End-to-end tests of the `mftk` binary: flag handling, exit codes,
//! output determinism, and the composed pipelines.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mftk_core::rng::SplitMix64;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mftk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mftk"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).to_string()
}

fn write_three_doc_corpus(path: &Path) {
    std::fs::write(
        path,
        concat!(
            "{\"id\":\"d1\",\"text\":\"They deceive us.\",\"labels\":{\"authority\":0,\"care\":0,\"fairness\":0,\"loyalty\":1,\"sanctity\":0}}\n",
            "{\"id\":\"d2\",\"text\":\"Wage slavery is indeed disgusting.\",\"labels\":{\"authority\":0,\"care\":1,\"fairness\":0,\"loyalty\":0,\"sanctity\":1}}\n",
            "{\"id\":\"d3\",\"text\":\"hello world\",\"labels\":{\"authority\":0,\"care\":0,\"fairness\":0,\"loyalty\":0,\"sanctity\":0}}\n",
        ),
    )
    .unwrap();
}

fn write_word_lexicon(path: &Path) {
    std::fs::write(
        path,
        "deceive\tloyalty.vice\nslavery\tcare.vice\ndisgusting\tsanctity.vice\n",
    )
    .unwrap();
}

#[test]
fn score_emits_five_rows_per_document() {
    let dir = tempfile::tempdir().unwrap();
    write_three_doc_corpus(&dir.path().join("corpus.jsonl"));
    write_word_lexicon(&dir.path().join("mfd2.tsv"));
    let out = run_in(
        dir.path(),
        &["score", "--method", "mfd2", "--lexicon", "mfd2.tsv", "--in", "corpus.jsonl", "--out", "s.csv"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect(); // header comment + columns
    assert_eq!(rows.len(), 15);
    assert!(text.lines().next().unwrap().starts_with("# mftk"));
    // Doc order, then canonical foundation order.
    assert!(rows[0].starts_with("d1,authority,"));
    assert!(rows[3].starts_with("d1,loyalty,0.3333333333333333,"));
    assert!(rows[14].starts_with("d3,sanctity,0,") || rows[14].starts_with("d3,sanctity,0.0,"));
}

#[test]
fn score_reruns_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    write_three_doc_corpus(&dir.path().join("corpus.jsonl"));
    write_word_lexicon(&dir.path().join("mfd2.tsv"));
    let args = ["score", "--method", "mfd2", "--lexicon", "mfd2.tsv", "--in", "corpus.jsonl", "--out", "s.csv"];
    assert!(run_in(dir.path(), &args).status.success());
    let first = std::fs::read(dir.path().join("s.csv")).unwrap();
    assert!(run_in(dir.path(), &args).status.success());
    let second = std::fs::read(dir.path().join("s.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn ddr_scoring_marks_unscoreable_documents() {
    let dir = tempfile::tempdir().unwrap();
    // Embeddings cover the seed words but not the second document.
    let mut embeddings = String::new();
    for set in mftk_core::ddr::default_seed_sets() {
        for (i, word) in set.words.iter().enumerate() {
            embeddings.push_str(&format!("{word} {}.0 1.0\n", i % 3));
        }
    }
    embeddings.push_str("hello 1.0 0.5\nworld 0.25 1.0\n");
    std::fs::write(dir.path().join("vec.txt"), embeddings).unwrap();
    std::fs::write(
        dir.path().join("corpus.jsonl"),
        "{\"id\":\"ok\",\"text\":\"hello world\"}\n{\"id\":\"oov\",\"text\":\"zz qq xx\"}\n",
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["score", "--method", "ddr", "--embeddings", "vec.txt", "--in", "corpus.jsonl", "--out", "s.csv"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let error_rows: Vec<&str> = text
        .lines()
        .filter(|l| l.contains("ZeroVector(document)"))
        .collect();
    assert_eq!(error_rows.len(), 5, "all five foundations flagged for the OOV doc");
    assert!(error_rows.iter().all(|l| l.starts_with("oov,")));
    // Scores for the scoreable doc are present and parseable.
    assert_eq!(text.lines().filter(|l| l.starts_with("ok,")).count(), 5);
}

#[test]
fn evaluate_reports_perfect_scorer_and_names_single_class_foundations() {
    let dir = tempfile::tempdir().unwrap();
    // 20 docs; care label = 1 for half; score equals the label for care,
    // constant 0.5 elsewhere; authority all-negative.
    let mut corpus = String::new();
    let mut scores = String::from("id,foundation,score,source\n");
    for i in 0..20 {
        let care = (i % 2 == 0) as u8;
        corpus.push_str(&format!(
            "{{\"id\":\"d{i:02}\",\"text\":\"t\",\"labels\":{{\"authority\":0,\"care\":{care},\"fairness\":{care},\"loyalty\":{care},\"sanctity\":{care}}}}}\n"
        ));
        for f in ["authority", "care", "fairness", "loyalty", "sanctity"] {
            let score = if f == "authority" { 0.5 } else { 0.1 + 0.8 * care as f64 };
            scores.push_str(&format!("d{i:02},{f},{score},m\n"));
        }
    }
    std::fs::write(dir.path().join("corpus.jsonl"), corpus).unwrap();
    std::fs::write(dir.path().join("s.csv"), scores).unwrap();

    let out = run_in(
        dir.path(),
        &["evaluate", "--scores", "s.csv", "--corpus", "corpus.jsonl", "--foundation", "care", "--out", "eval.json"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("eval.json")).unwrap())
            .unwrap();
    assert_eq!(report["foundations"][0]["auc"], 1.0);
    assert_eq!(report["foundations"][0]["n"], 20);

    // The all-negative foundation is named in the failure.
    let out = run_in(
        dir.path(),
        &["evaluate", "--scores", "s.csv", "--corpus", "corpus.jsonl", "--foundation", "authority"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("authority"), "{}", stderr_of(&out));
}

#[test]
fn evaluate_random_scores_give_auc_near_half() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = SplitMix64::new(424242);
    let n = 10_000;
    let mut corpus = String::new();
    let mut scores = String::from("id,foundation,score,source\n");
    for i in 0..n {
        let label = (i % 2) as u8;
        corpus.push_str(&format!(
            "{{\"id\":\"d{i:05}\",\"text\":\"t\",\"labels\":{{\"authority\":{label},\"care\":{label},\"fairness\":{label},\"loyalty\":{label},\"sanctity\":{label}}}}}\n"
        ));
        for f in ["authority", "care", "fairness", "loyalty", "sanctity"] {
            scores.push_str(&format!("d{i:05},{f},{},m\n", rng.next_f64()));
        }
    }
    std::fs::write(dir.path().join("corpus.jsonl"), corpus).unwrap();
    std::fs::write(dir.path().join("s.csv"), scores).unwrap();
    let out = run_in(
        dir.path(),
        &["evaluate", "--scores", "s.csv", "--corpus", "corpus.jsonl", "--out", "eval.json"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("eval.json")).unwrap())
            .unwrap();
    for entry in report["foundations"].as_array().unwrap() {
        let auc = entry["auc"].as_f64().unwrap();
        assert!((0.48..=0.52).contains(&auc), "{}: {auc}", entry["foundation"]);
    }
}

#[test]
fn evaluate_skips_calibration_for_out_of_range_scores() {
    let dir = tempfile::tempdir().unwrap();
    let mut corpus = String::new();
    let mut scores = String::from("id,foundation,score,source\n");
    for i in 0..10 {
        let label = (i % 2) as u8;
        corpus.push_str(&format!(
            "{{\"id\":\"d{i}\",\"text\":\"t\",\"labels\":{{\"authority\":{label},\"care\":{label},\"fairness\":{label},\"loyalty\":{label},\"sanctity\":{label}}}}}\n"
        ));
        for f in ["authority", "care", "fairness", "loyalty", "sanctity"] {
            // Cosine-style scores in [-1, 1].
            scores.push_str(&format!("d{i},{f},{},ddr\n", i as f64 / 5.0 - 1.0));
        }
    }
    std::fs::write(dir.path().join("corpus.jsonl"), corpus).unwrap();
    std::fs::write(dir.path().join("s.csv"), scores).unwrap();
    let out = run_in(
        dir.path(),
        &["evaluate", "--scores", "s.csv", "--corpus", "corpus.jsonl", "--foundation", "care", "--out", "eval.json"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("eval.json")).unwrap())
            .unwrap();
    let entry = &report["foundations"][0];
    assert!(entry["calibration"].is_null() || entry.get("calibration").is_none());
    assert!(entry["calibration_skipped"]
        .as_str()
        .unwrap()
        .contains("outside [0, 1]"));
    // AUC is scale-free and still reported.
    assert!(entry["auc"].as_f64().is_some());
}

#[test]
fn split_is_deterministic_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let mut corpus = String::new();
    let mut rng = SplitMix64::new(5150);
    for i in 0..60 {
        let labels: Vec<u8> = (0..5).map(|_| rng.next_bool(0.3) as u8).collect();
        corpus.push_str(&format!(
            "{{\"id\":\"d{i:02}\",\"text\":\"t\",\"labels\":{{\"authority\":{},\"care\":{},\"fairness\":{},\"loyalty\":{},\"sanctity\":{}}}}}\n",
            labels[0], labels[1], labels[2], labels[3], labels[4]
        ));
    }
    std::fs::write(dir.path().join("corpus.jsonl"), corpus).unwrap();

    let args = ["split", "--strategy", "iterative", "--fractions", "0.9,0.1", "--in", "corpus.jsonl", "--out-prefix", "p", "--seed", "7"];
    assert!(run_in(dir.path(), &args).status.success());
    let part0 = std::fs::read(dir.path().join("p.part0.jsonl")).unwrap();
    let part1 = std::fs::read(dir.path().join("p.part1.jsonl")).unwrap();
    assert!(run_in(dir.path(), &args).status.success());
    assert_eq!(part0, std::fs::read(dir.path().join("p.part0.jsonl")).unwrap());
    assert_eq!(part1, std::fs::read(dir.path().join("p.part1.jsonl")).unwrap());

    // Partition: every id lands in exactly one part.
    let ids = |bytes: &[u8]| -> Vec<String> {
        String::from_utf8_lossy(bytes)
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["id"]
                .as_str()
                .unwrap()
                .to_string())
            .collect()
    };
    let mut all = ids(&part0);
    all.extend(ids(&part1));
    all.sort();
    assert_eq!(all.len(), 60);
    all.dedup();
    assert_eq!(all.len(), 60);

    // Bad fractions are a data error.
    let out = run_in(
        dir.path(),
        &["split", "--strategy", "iterative", "--fractions", "0.6,0.5", "--in", "corpus.jsonl", "--out-prefix", "q", "--seed", "7"],
    );
    assert_eq!(out.status.code(), Some(2));

    // Missing seed is a usage error; MFTK_SEED is an accepted fallback.
    let out = run_in(
        dir.path(),
        &["split", "--strategy", "iterative", "--fractions", "0.9,0.1", "--in", "corpus.jsonl", "--out-prefix", "q"],
    );
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_mftk"))
        .current_dir(dir.path())
        .env("MFTK_SEED", "7")
        .args(["split", "--strategy", "iterative", "--fractions", "0.9,0.1", "--in", "corpus.jsonl", "--out-prefix", "env_seeded"])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{}", stderr_of(&out));
    // The env seed equals --seed 7, so the partition bytes match.
    assert_eq!(
        std::fs::read(dir.path().join("env_seeded.part1.jsonl"))
            .unwrap()
            .split(|&b| b == b'\n')
            .skip(1)
            .flatten()
            .copied()
            .collect::<Vec<u8>>(),
        std::fs::read(dir.path().join("p.part1.jsonl"))
            .unwrap()
            .split(|&b| b == b'\n')
            .skip(1)
            .flatten()
            .copied()
            .collect::<Vec<u8>>()
    );

    // Single-class corpora cannot be stratified.
    let mut single = String::new();
    for i in 0..10 {
        single.push_str(&format!(
            "{{\"id\":\"s{i}\",\"text\":\"t\",\"labels\":{{\"authority\":1,\"care\":0,\"fairness\":0,\"loyalty\":0,\"sanctity\":0}}}}\n"
        ));
    }
    std::fs::write(dir.path().join("single.jsonl"), single).unwrap();
    let out = run_in(
        dir.path(),
        &["split", "--strategy", "stratified", "--foundation", "authority", "--in", "single.jsonl", "--out-prefix", "r", "--seed", "3"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn train_on_separable_text_chooses_smallest_c() {
    let dir = tempfile::tempdir().unwrap();
    // Single-word documents keep the corpus perfectly separable while
    // large enough that even C = 1e-7 moves off the zero model, so every
    // grid value saturates validation AUC and the tie rule decides.
    let mut corpus = String::new();
    for i in 0..110 {
        let positive = i % 2 == 0;
        let text = if positive { "wonderful" } else { "terrible" };
        corpus.push_str(&format!(
            "{{\"id\":\"d{i:03}\",\"text\":\"{text}\",\"labels\":{{\"authority\":0,\"care\":{},\"fairness\":0,\"loyalty\":0,\"sanctity\":1}}}}\n",
            positive as u8
        ));
    }
    std::fs::write(dir.path().join("corpus.jsonl"), corpus).unwrap();
    let out = run_in(
        dir.path(),
        &["train", "--in", "corpus.jsonl", "--foundation", "care", "--loss", "logistic", "--cv-grid", "default", "--out", "model.json", "--seed", "11"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("model.json")).unwrap())
            .unwrap();
    // Separable data saturates validation AUC for every C; the tie rule
    // picks the smallest grid value.
    assert_eq!(model["c"].as_f64().unwrap(), 1e-7);
    assert_eq!(model["cv"]["chosen_c"].as_f64().unwrap(), 1e-7);
    assert_eq!(model["cv"]["per_c"].as_array().unwrap().len(), 15);
    assert_eq!(model["foundation"], "care");
    assert_eq!(model["format_version"], 1);

    // Re-training with the same seed is deterministic.
    let first = std::fs::read(dir.path().join("model.json")).unwrap();
    assert!(run_in(
        dir.path(),
        &["train", "--in", "corpus.jsonl", "--foundation", "care", "--loss", "logistic", "--cv-grid", "default", "--out", "model.json", "--seed", "11"],
    )
    .status
    .success());
    assert_eq!(first, std::fs::read(dir.path().join("model.json")).unwrap());
}

#[test]
fn analyze_odds_chi2_and_mwu_on_planted_association() {
    let dir = tempfile::tempdir().unwrap();
    // Fixed seed, verified to make the constructed example behave as
    // intended: the planted foundation is clearly significant and the four
    // independent ones are not (each independent test has a 5% false
    // positive rate under an arbitrary seed).
    let mut rng = SplitMix64::new(0);
    let n = 2000;
    let mut scores = String::from("id,foundation,score,source\n");
    let mut outcomes = String::from("id,outcome\n");
    for i in 0..n {
        let id = format!("d{i:04}");
        // care: exposure = top-20% score; planted OR 3.0 on the outcome.
        let care_score = rng.next_f64();
        let exposed = care_score > 0.8;
        let p_pos = if exposed { 0.5 } else { 0.25 };
        let outcome = rng.next_bool(p_pos) as u8;
        outcomes.push_str(&format!("{id},{outcome}\n"));
        for f in ["authority", "care", "fairness", "loyalty", "sanctity"] {
            let score = if f == "care" { care_score } else { rng.next_f64() };
            scores.push_str(&format!("{id},{f},{score},m\n"));
        }
    }
    std::fs::write(dir.path().join("s.csv"), scores).unwrap();
    std::fs::write(dir.path().join("o.csv"), outcomes).unwrap();

    let out = run_in(
        dir.path(),
        &["analyze", "--kind", "odds", "--scores", "s.csv", "--outcomes", "o.csv", "--out", "odds.json", "--out-csv", "odds.csv"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("odds.json")).unwrap())
            .unwrap();
    assert_eq!(report["percentile"], 80.0);
    for row in report["rows"].as_array().unwrap() {
        let foundation = row["foundation"].as_str().unwrap();
        let or = row["odds_ratio"].as_f64().unwrap();
        let significant = row["significant"].as_bool().unwrap();
        if foundation == "care" {
            assert!((2.2..=4.2).contains(&or), "planted OR {or}");
            assert!(significant);
        } else {
            // Independent foundations: CI contains 1 for this seed.
            assert!(!significant, "{foundation} spuriously significant (OR {or})");
        }
    }
    let csv = std::fs::read_to_string(dir.path().join("odds.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("foundation,log_or,ci_low,ci_high,significant"));
    assert_eq!(csv.lines().count(), 7); // header comment + columns + 5 rows

    // Chi-square on the same data: the planted association dominates.
    let out = run_in(
        dir.path(),
        &["analyze", "--kind", "chi2", "--scores", "s.csv", "--outcomes", "o.csv", "--out", "chi2.json"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("chi2.json")).unwrap())
            .unwrap();
    for row in report["rows"].as_array().unwrap() {
        let p = row["p"].as_f64().unwrap();
        if row["foundation"] == "care" {
            assert!(p < 0.001, "planted association p = {p}");
        } else {
            assert!(p > 0.05, "{}: p = {p}", row["foundation"]);
        }
    }

    // Mann–Whitney: outcome-positive docs score higher on care.
    let out = run_in(
        dir.path(),
        &["analyze", "--kind", "mwu", "--scores", "s.csv", "--outcomes", "o.csv", "--out", "mwu.json"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("mwu.json")).unwrap())
            .unwrap();
    for row in report["rows"].as_array().unwrap() {
        let p = row["p_two_sided"].as_f64().unwrap();
        if row["foundation"] == "care" {
            assert!(p < 0.001);
            assert!(
                row["mean_score_positive_outcome"].as_f64().unwrap()
                    > row["mean_score_negative_outcome"].as_f64().unwrap()
            );
        } else {
            assert!(p > 0.05, "{}: p = {p}", row["foundation"]);
        }
    }
}

#[test]
fn analyze_odds_zero_cell_requires_haldane() {
    let dir = tempfile::tempdir().unwrap();
    let mut scores = String::from("id,foundation,score,source\n");
    let mut outcomes = String::from("id,outcome\n");
    for i in 0..50 {
        let id = format!("d{i:02}");
        // Exposed docs (top 20%) always have outcome 1: a zero cell.
        let score = i as f64 / 50.0;
        let outcome = (score > 0.8) as u8;
        outcomes.push_str(&format!("{id},{outcome}\n"));
        for f in ["authority", "care", "fairness", "loyalty", "sanctity"] {
            scores.push_str(&format!("{id},{f},{score},m\n"));
        }
    }
    std::fs::write(dir.path().join("s.csv"), scores).unwrap();
    std::fs::write(dir.path().join("o.csv"), outcomes).unwrap();

    let out = run_in(
        dir.path(),
        &["analyze", "--kind", "odds", "--scores", "s.csv", "--outcomes", "o.csv"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--haldane"));

    let out = run_in(
        dir.path(),
        &["analyze", "--kind", "odds", "--scores", "s.csv", "--outcomes", "o.csv", "--haldane", "--out", "odds.json"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("odds.json")).unwrap())
            .unwrap();
    assert!(report["rows"][0]["haldane"].as_bool().unwrap());
}

#[test]
fn analyze_prevalence_four_doc_example() {
    let dir = tempfile::tempdir().unwrap();
    let mut corpus = String::new();
    for i in 0..4 {
        let loyalty = (i < 2) as u8;
        corpus.push_str(&format!(
            "{{\"id\":\"d{i}\",\"text\":\"t\",\"labels\":{{\"authority\":0,\"care\":0,\"fairness\":0,\"loyalty\":{loyalty},\"sanctity\":0}}}}\n"
        ));
    }
    std::fs::write(dir.path().join("corpus.jsonl"), corpus).unwrap();
    let out = run_in(
        dir.path(),
        &["analyze", "--kind", "prevalence", "--corpus", "corpus.jsonl"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(report["groups"][0]["loyalty"], 0.5);
    assert_eq!(report["groups"][0]["care"], 0.0);
    assert_eq!(report["groups"][0]["n"], 4);
}

#[test]
fn analyze_length_bias_and_keyword_bias() {
    let dir = tempfile::tempdir().unwrap();
    write_word_lexicon(&dir.path().join("mfd2.tsv"));
    let mut rng = SplitMix64::new(2222);
    let mut corpus = String::new();
    for i in 0..200 {
        let length = 10 + rng.next_below(90) as usize;
        let mut words: Vec<String> = (0..length).map(|k| format!("w{k}x")).collect();
        // One lexicon match per ~10 tokens.
        for slot in 0..length / 10 {
            words[slot * 10] = "deceive".to_string();
        }
        // Keyword groups.
        match i % 3 {
            0 => words.push("father".to_string()),
            1 => words.push("mother".to_string()),
            _ => {}
        }
        corpus.push_str(&format!(
            "{{\"id\":\"d{i:03}\",\"text\":\"{}\"}}\n",
            words.join(" ")
        ));
    }
    std::fs::write(dir.path().join("corpus.jsonl"), corpus).unwrap();

    let out = run_in(
        dir.path(),
        &["analyze", "--kind", "length-bias", "--corpus", "corpus.jsonl", "--method", "mfd2", "--lexicon", "mfd2.tsv"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert!(report["r_raw"].as_f64().unwrap() > 0.8);

    let out = run_in(
        dir.path(),
        &["analyze", "--kind", "keyword-bias", "--corpus", "corpus.jsonl", "--method", "mfd2", "--lexicon", "mfd2.tsv", "--keyword-a", "father", "--keyword-b", "mother"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    let groups = report["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 3);
    assert_eq!(groups[0]["group"], "father");
    assert!(groups[0]["n"].as_u64().unwrap() > 0);
}

#[test]
fn lexicon_stats_toy_overlap() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.tsv"), "a\tcare.virtue\nb\tcare.vice\n").unwrap();
    std::fs::write(dir.path().join("b.tsv"), "b\tcare.virtue\nc\tcare.vice\n").unwrap();
    std::fs::write(dir.path().join("c.tsv"), "c\tcare.virtue\nd\tcare.vice\n").unwrap();
    let out = run_in(
        dir.path(),
        &["lexicon-stats", "a.tsv", "b.tsv", "c.tsv", "--kinds", "word,word,word"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(report["intersection_ab"], 1);
    assert_eq!(report["intersection_ac"], 0);
    assert_eq!(report["intersection_bc"], 1);
    assert_eq!(report["intersection_abc"], 0);
}

#[test]
fn config_file_fills_gaps_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    write_three_doc_corpus(&dir.path().join("corpus.jsonl"));
    write_word_lexicon(&dir.path().join("mfd2.tsv"));
    std::fs::write(
        dir.path().join("run.cfg"),
        "method=mfd2\nlexicon=mfd2.tsv\nin=corpus.jsonl\nout=from_config.csv\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["score", "--config", "run.cfg"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(dir.path().join("from_config.csv").exists());

    // The explicit flag overrides the config value.
    let out = run_in(
        dir.path(),
        &["score", "--config", "run.cfg", "--out", "from_flag.csv"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(dir.path().join("from_flag.csv").exists());
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    // Usage: missing required flag.
    let out = run_in(dir.path(), &["score", "--method", "mfd2"]);
    assert_eq!(out.status.code(), Some(1));
    // Usage: unknown subcommand.
    let out = run_in(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    // Usage: unknown method.
    write_three_doc_corpus(&dir.path().join("corpus.jsonl"));
    let out = run_in(
        dir.path(),
        &["score", "--method", "bogus", "--in", "corpus.jsonl", "--out", "s.csv"],
    );
    assert_eq!(out.status.code(), Some(1));
    // Data: missing input file.
    let out = run_in(
        dir.path(),
        &["score", "--method", "mfd2", "--lexicon", "nope.tsv", "--in", "corpus.jsonl", "--out", "s.csv"],
    );
    assert_eq!(out.status.code(), Some(2));
    // Data: malformed lexicon.
    std::fs::write(dir.path().join("bad.tsv"), "word-without-tab\n").unwrap();
    let out = run_in(
        dir.path(),
        &["score", "--method", "mfd2", "--lexicon", "bad.tsv", "--in", "corpus.jsonl", "--out", "s.csv"],
    );
    assert_eq!(out.status.code(), Some(2));
    // Version exits 0 and reports format versions.
    let out = run(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("mftk"), "{text}");
    assert!(text.contains("formats"), "{text}");
}

#[test]
fn score_then_evaluate_pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    // 40 docs where the lexicon word tracks the care label most of the
    // time: the scorer should beat chance comfortably.
    let mut rng = SplitMix64::new(99);
    let mut corpus = String::new();
    for i in 0..40 {
        let positive = i % 2 == 0;
        let mention = if positive { rng.next_bool(0.9) } else { rng.next_bool(0.1) };
        let text = if mention {
            "they enslave and deceive people"
        } else {
            "a calm afternoon by the lake"
        };
        corpus.push_str(&format!(
            "{{\"id\":\"d{i:02}\",\"text\":\"{text}\",\"labels\":{{\"authority\":0,\"care\":{},\"fairness\":0,\"loyalty\":{},\"sanctity\":0}}}}\n",
            positive as u8,
            (i % 4 == 0) as u8
        ));
    }
    std::fs::write(dir.path().join("corpus.jsonl"), corpus).unwrap();
    std::fs::write(dir.path().join("lex.tsv"), "enslave\tcare.vice\ndeceive\tloyalty.vice\n").unwrap();

    assert!(run_in(
        dir.path(),
        &["score", "--method", "mfd2", "--lexicon", "lex.tsv", "--in", "corpus.jsonl", "--out", "s.csv"],
    )
    .status
    .success());
    let out = run_in(
        dir.path(),
        &["evaluate", "--scores", "s.csv", "--corpus", "corpus.jsonl", "--foundation", "care", "--out", "eval.json", "--thresholds-csv", "thresholds.csv"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("eval.json")).unwrap())
            .unwrap();
    assert!(report["foundations"][0]["auc"].as_f64().unwrap() > 0.8);
    let csv = std::fs::read_to_string(dir.path().join("thresholds.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 6); // header comment + columns + six rows
}

#[test]
fn help_lists_all_subcommands() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for command in ["score", "evaluate", "split", "train", "analyze", "lexicon-stats"] {
        assert!(text.contains(command), "missing {command} in help");
    }
    let _ = PathBuf::new();
}
