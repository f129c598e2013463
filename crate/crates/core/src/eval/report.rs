//! Plain-text and CSV renderings of accuracy, per-class and confusion tables.

use std::fmt::Write;

use super::{ClassMetrics, ConfusionMatrix, ExperimentReport, TTest};

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

fn significance(t: &TTest) -> &'static str {
    if t.significant_01 {
        "p<.01"
    } else if t.significant_05 {
        "p<.05"
    } else {
        "NS"
    }
}

fn t_text(t: f64) -> String {
    if t.is_infinite() {
        if t > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{t:.2}")
    }
}

/// Accuracy table (row, model, feature sets, mean accuracy with standard
/// error) followed by every pairwise t-test.
pub fn accuracy_table(r: &ExperimentReport) -> String {
    let mut s = format!("{}-fold cross-validation, {} examples, seed {}\n\n", r.k, r.examples, r.seed);
    s.push_str("Row\tModel Tested\tFeature Sets Used\tAccuracy (SE)\n");
    for (i, row) in r.rows.iter().enumerate() {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{} ({:.1})",
            i + 1,
            row.config.model,
            row.config.feature_label(),
            pct(row.result.mean),
            100.0 * row.result.standard_error
        );
    }
    if r.rows.len() > 1 {
        let _ = writeln!(s, "\nPaired t-tests (df={})\nRow A\tRow B\tt\tSignificance", r.k - 1);
        for i in 0..r.rows.len() {
            for j in i + 1..r.rows.len() {
                if let Some(t) = &r.t_matrix[i][j] {
                    let _ = writeln!(s, "{}\t{}\t{}\t{}", i + 1, j + 1, t_text(t.t), significance(t));
                }
            }
        }
    }
    s
}

pub fn accuracy_csv(r: &ExperimentReport) -> String {
    let mut s = String::from("row,model,features,accuracy,standard_error\n");
    for (i, row) in r.rows.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},\"{}\",\"{}\",{:.6},{:.6}",
            i + 1,
            row.config.model,
            row.config.feature_label(),
            row.result.mean,
            row.result.standard_error
        );
    }
    s
}

pub fn ttest_csv(r: &ExperimentReport) -> String {
    let mut s = String::from("row_a,row_b,t,df,sig05,sig01\n");
    for i in 0..r.rows.len() {
        for j in i + 1..r.rows.len() {
            if let Some(t) = &r.t_matrix[i][j] {
                let _ = writeln!(s, "{},{},{},{},{},{}", i + 1, j + 1, t_text(t.t), t.df, t.significant_05, t.significant_01);
            }
        }
    }
    s
}

/// Recall, precision and fallout in percent, F as a fraction.
pub fn class_metrics_table(metrics: &[ClassMetrics]) -> String {
    let mut s = String::from("Class\tRecall\tPrecision\tFallout\tF\n");
    for m in metrics {
        let _ = writeln!(
            s,
            "{}\t{:.2}\t{:.2}\t{:.2}\t{:.2}",
            m.label,
            100.0 * m.recall,
            100.0 * m.precision,
            100.0 * m.fallout,
            m.f1
        );
    }
    s
}

pub fn class_metrics_csv(metrics: &[ClassMetrics]) -> String {
    let mut s = String::from("class,recall,precision,fallout,f\n");
    for m in metrics {
        let _ = writeln!(s, "{},{:.6},{:.6},{:.6},{:.6}", m.label, m.recall, m.precision, m.fallout, m.f1);
    }
    s
}

/// Grid with gold labels down the side and predictions across the top.
pub fn confusion_table(m: &ConfusionMatrix) -> String {
    let mut s = String::from("gold\\predicted");
    for l in &m.labels {
        let _ = write!(s, "\t{l}");
    }
    s.push('\n');
    for (l, row) in m.labels.iter().zip(&m.counts) {
        s.push_str(l.as_str());
        for c in row {
            let _ = write!(s, "\t{c}");
        }
        s.push('\n');
    }
    s
}

pub fn confusion_csv(m: &ConfusionMatrix) -> String {
    confusion_table(m).replace('\t', ",")
}
