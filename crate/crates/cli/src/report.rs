use serde_json::{Map, Value};

/// Rounds to 15 significant digits; non-finite values become null.
pub fn num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{v:.14e}").parse().unwrap_or(v);
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

/// Output of one run: the JSON document plus a CSV table.
#[derive(Debug)]
pub struct Report {
    pub request: Value,
    pub result: Value,
    pub diagnostics: Value,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
}

impl Report {
    pub fn render_json(&self) -> String {
        let mut doc = Map::new();
        doc.insert("request".into(), self.request.clone());
        doc.insert("result".into(), self.result.clone());
        doc.insert("diagnostics".into(), self.diagnostics.clone());
        let mut out = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
        out.push('\n');
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = self.csv_header.join(",");
        out.push('\n');
        for row in &self.csv_rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// CSV cell for a number, 15 significant digits.
pub fn cell(v: f64) -> String {
    match num(v) {
        Value::Number(n) => n.to_string(),
        _ => "nan".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(num(0.1 + 0.2).to_string(), "0.3");
        assert_eq!(num(1.0 / 3.0).to_string(), "0.333333333333333");
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(cell(f64::INFINITY), "nan");
    }
}
