//! `mftk score`: one row per (document, foundation), documents in input
//! order and foundations in canonical order. Re-running the same
//! invocation produces byte-identical output. Documents the DDR scorer
//! cannot handle are emitted with the error column set, never dropped.

use mftk_core::ddr::ddr_score;
use mftk_core::foundation::Foundation;
use mftk_core::text::tokenize;

use crate::cli::{data, load_config, require_path, require_string, resolve_path, resolve_string, CliError, ScoreArgs};
use crate::commands::common::{
    header_for, load_embeddings, load_seed_sets, Method, WordCountScorer,
};
use mftk::io::{read_corpus, write_scores, ScoreError, ScoreRecord};

pub fn run(args: ScoreArgs) -> Result<(), CliError> {
    let config = load_config(&args.config)?;
    let method = Method::parse(&require_string(&args.method, &config, "method")?)?;
    let input = require_path(&args.input, &config, "in")?;
    let out = require_path(&args.out, &config, "out")?;
    let source = resolve_string(&args.source, &config, "source")
        .unwrap_or_else(|| method.name().to_string());

    let corpus = read_corpus(&input).map_err(data)?;
    let docs = corpus.documents();
    let tokenized: Vec<_> = docs.iter().map(tokenize).collect();

    let mut settings: Vec<(&str, String)> = vec![
        ("command", "score".into()),
        ("method", method.name().into()),
        ("in", input.display().to_string()),
        ("out", out.display().to_string()),
        ("source", source.clone()),
    ];

    let mut rows: Vec<Result<ScoreRecord, ScoreError>> =
        Vec::with_capacity(tokenized.len() * Foundation::COUNT);
    let mut error_count = 0usize;

    match method {
        Method::Mfd | Method::Mfd2 | Method::Emfd => {
            let lexicon_path = require_path(&args.lexicon, &config, "lexicon")?;
            settings.push(("lexicon", lexicon_path.display().to_string()));
            let scorer = WordCountScorer::load(method, &lexicon_path)?;
            for tdoc in &tokenized {
                let scores = scorer.score(tdoc);
                for foundation in Foundation::ALL {
                    rows.push(Ok(ScoreRecord {
                        doc_id: tdoc.doc_id.clone(),
                        foundation,
                        score: scores.get(foundation),
                        source: source.clone(),
                    }));
                }
            }
        }
        Method::Ddr => {
            let embeddings_path = require_path(&args.embeddings, &config, "embeddings")?;
            settings.push(("embeddings", embeddings_path.display().to_string()));
            let seeds_path = resolve_path(&args.seeds, &config, "seeds");
            if let Some(p) = &seeds_path {
                settings.push(("seeds", p.display().to_string()));
            }
            let table = load_embeddings(&embeddings_path)?;
            let seed_sets = load_seed_sets(seeds_path.as_deref())?;
            for tdoc in &tokenized {
                for (foundation, seeds) in Foundation::ALL.iter().zip(&seed_sets) {
                    match ddr_score(tdoc, seeds, &table) {
                        Ok(score) => rows.push(Ok(ScoreRecord {
                            doc_id: tdoc.doc_id.clone(),
                            foundation: *foundation,
                            score,
                            source: source.clone(),
                        })),
                        Err(e) => {
                            error_count += 1;
                            rows.push(Err(ScoreError {
                                doc_id: tdoc.doc_id.clone(),
                                foundation: *foundation,
                                source: source.clone(),
                                error: compact_error(&e),
                            }));
                        }
                    }
                }
            }
        }
    }

    let header = header_for(&settings, None);
    write_scores(&out, &rows, &header).map_err(data)?;
    println!(
        "scored {} documents x {} foundations -> {} ({} rows, {} errors)",
        tokenized.len(),
        Foundation::COUNT,
        out.display(),
        rows.len(),
        error_count
    );
    Ok(())
}

fn compact_error(e: &mftk_core::ddr::DdrError) -> String {
    use mftk_core::ddr::{DdrError, ZeroVectorSide};
    match e {
        DdrError::ZeroVector(ZeroVectorSide::Document) => "ZeroVector(document)".into(),
        DdrError::ZeroVector(ZeroVectorSide::Foundation) => "ZeroVector(foundation)".into(),
        other => other.to_string(),
    }
}
