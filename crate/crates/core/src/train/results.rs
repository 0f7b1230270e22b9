//! The component-study table: every ablation row trained per domain, then
//! scored on the held-out test pairs and the generalization suite.

use std::path::Path;

use rayon::prelude::*;

use crate::dataset::{Corpus, CorpusConfig, Split};
use crate::error::TrainError;
use crate::gentest::{CaseType, GenCase, CASE_TYPES};
use crate::toolnet::ModelConfig;
use crate::worldmodel::Domain;

use super::{
    evaluate, evaluate_gentest, ladder, split_cases, train, Ablation, SplitEval, TrainConfig,
};

/// One trained ablation row's accuracies. Domains and families the run
/// never saw are simply absent.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultsRow {
    pub label: String,
    pub test: Vec<(Domain, SplitEval)>,
    /// Suite accuracy per family, both domains pooled.
    pub gentest_types: Vec<(CaseType, SplitEval)>,
    pub gentest_domains: Vec<(Domain, SplitEval)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultsTable {
    pub rows: Vec<ResultsRow>,
}

impl ResultsTable {
    /// Renders the table with one fixed column set: test accuracy per
    /// domain, suite accuracy per family, suite accuracy per domain. Cells
    /// are percentages with two decimals; absent measurements stay empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "model,Test(home),Test(factory),GenTest I,GenTest II,GenTest III,GenTest IV,GenTest V,GenTest(home),GenTest(factory)\n",
        );
        for row in &self.rows {
            let mut cells = vec![row.label.clone()];
            for domain in [Domain::Home, Domain::Factory] {
                cells.push(percent(lookup(&row.test, domain)));
            }
            for case_type in CASE_TYPES {
                cells.push(percent(lookup(&row.gentest_types, case_type)));
            }
            for domain in [Domain::Home, Domain::Factory] {
                cells.push(percent(lookup(&row.gentest_domains, domain)));
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), TrainError> {
        std::fs::write(path, self.to_csv())
            .map_err(|e| TrainError::Config(format!("cannot write {}: {e}", path.display())))
    }
}

fn lookup<K: PartialEq + Copy>(cells: &[(K, SplitEval)], key: K) -> Option<SplitEval> {
    cells.iter().find(|(k, _)| *k == key).map(|(_, e)| *e)
}

fn percent(eval: Option<SplitEval>) -> String {
    match eval {
        Some(e) => format!("{:.2}", e.accuracy() * 100.0),
        None => String::new(),
    }
}

/// Trains and scores every ladder row. Rows run in parallel; within a row,
/// one model is fitted per corpus domain, scored on its held-out test
/// pairs, and run over its share of the generalization suite. Family
/// columns pool both domains' suites.
pub fn run_table(
    corpus: &Corpus,
    corpus_cfg: &CorpusConfig,
    suite: &[GenCase],
    train_cfg: &TrainConfig,
    base: &ModelConfig,
) -> Result<ResultsTable, TrainError> {
    let rows: Result<Vec<ResultsRow>, TrainError> = ladder(base)
        .par_iter()
        .map(|ablation| run_row(corpus, corpus_cfg, suite, train_cfg, ablation))
        .collect();
    Ok(ResultsTable { rows: rows? })
}

fn run_row(
    corpus: &Corpus,
    corpus_cfg: &CorpusConfig,
    suite: &[GenCase],
    train_cfg: &TrainConfig,
    ablation: &Ablation,
) -> Result<ResultsRow, TrainError> {
    let provider = ablation.provider();
    let held_out = corpus_cfg.held_out_seed();
    let mut row = ResultsRow {
        label: ablation.label.clone(),
        test: Vec::new(),
        gentest_types: Vec::new(),
        gentest_domains: Vec::new(),
    };
    let mut families: Vec<(CaseType, SplitEval)> = Vec::new();
    for &domain in &corpus_cfg.domains {
        let outcome = train(corpus, held_out, domain, train_cfg, ablation, &provider)?;
        let test_cases = split_cases(corpus, held_out, domain, Split::Test);
        row.test
            .push((domain, evaluate(&outcome.params, &ablation.model, &provider, &test_cases)?));
        if suite.iter().any(|c| c.domain == domain) {
            let on_suite =
                evaluate_gentest(&outcome.params, &ablation.model, &provider, domain, suite)?;
            row.gentest_domains.push((domain, on_suite.overall));
            for (case_type, eval) in on_suite.per_type {
                match families.iter_mut().find(|(t, _)| *t == case_type) {
                    Some((_, merged)) => merged.absorb(eval),
                    None => families.push((case_type, eval)),
                }
            }
        }
    }
    families.sort_by_key(|(t, _)| CASE_TYPES.iter().position(|c| c == t));
    row.gentest_types = families;
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(correct: usize, total: usize) -> SplitEval {
        SplitEval { correct, total }
    }

    #[test]
    fn csv_keeps_the_fixed_column_layout() {
        let table = ResultsTable {
            rows: vec![ResultsRow {
                label: "GGCN".to_string(),
                test: vec![(Domain::Home, eval(5, 8)), (Domain::Factory, eval(4, 8))],
                gentest_types: vec![
                    (CaseType::Relocation, eval(3, 4)),
                    (CaseType::NovelGoalObject, eval(1, 3)),
                ],
                gentest_domains: vec![(Domain::Home, eval(4, 7))],
            }],
        };
        let csv = table.to_csv();
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert_eq!(
            header,
            "model,Test(home),Test(factory),GenTest I,GenTest II,GenTest III,GenTest IV,GenTest V,GenTest(home),GenTest(factory)"
        );
        let row = lines.next().unwrap();
        assert_eq!(row, "GGCN,62.50,50.00,75.00,,,,33.33,57.14,");
        assert!(lines.next().is_none());
    }

    #[test]
    fn absent_measurements_leave_empty_cells() {
        let table = ResultsTable {
            rows: vec![ResultsRow {
                label: "+W".to_string(),
                test: vec![(Domain::Factory, eval(8, 8))],
                gentest_types: Vec::new(),
                gentest_domains: Vec::new(),
            }],
        };
        let row = table.to_csv().lines().nth(1).unwrap().to_string();
        assert_eq!(row, "+W,,100.00,,,,,,,");
    }
}
