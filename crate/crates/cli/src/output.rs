//! JSON and CSV rendering of result documents.

use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("documents are serializable");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut rows = vec!["key,value".to_string()];
            flatten("", doc, &mut rows);
            rows.join("\n") + "\n"
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per leaf; nested keys are joined with '.', array positions are indices.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<String>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, rows);
            }
        }
        Value::String(s) => rows.push(format!("{},{}", csv_field(prefix), csv_field(s))),
        other => rows.push(format!("{},{}", csv_field(prefix), other)),
    }
}

/// Matrix rows as CSV lines `name,row,col,value`.
pub fn matrices_csv(named: &[(&str, &Value)]) -> String {
    let mut out = vec!["matrix,row,col,value".to_string()];
    for (name, m) in named {
        match m {
            Value::Array(rows) => {
                for (i, row) in rows.iter().enumerate() {
                    match row {
                        Value::Array(cols) => {
                            for (j, x) in cols.iter().enumerate() {
                                out.push(format!("{name},{i},{j},{}", x.as_str().map_or_else(|| x.to_string(), str::to_string)));
                            }
                        }
                        x => out.push(format!("{name},{i},{i},{x}")),
                    }
                }
            }
            x => out.push(format!("{name},,,{x}")),
        }
    }
    out.join("\n") + "\n"
}
