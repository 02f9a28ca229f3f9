use std::fmt::Write;

use super::Polygon;

/// Fixed-point with at most six fractional digits, trailing zeros trimmed
/// down to one fractional digit. Negative zero prints as `0.0`.
pub fn format_number(x: f64) -> String {
    let mut s = format!("{x:.6}");
    while s.ends_with('0') && !s.ends_with(".0") {
        s.pop();
    }
    if s == "-0.0" {
        s = "0.0".to_string();
    }
    s
}

fn json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Layout document: `{"units":"mm","polygons":[{"layer":..,"kind":..,"vertices":[[x,y],..]},..]}`.
pub fn export_json(polys: &[Polygon]) -> String {
    export_json_with_notes(polys, &[])
}

/// [`export_json`] with a trailing `"notes"` array when `notes` is non-empty.
pub fn export_json_with_notes(polys: &[Polygon], notes: &[String]) -> String {
    let mut out = String::from("{\"units\":\"mm\",\"polygons\":[");
    for (i, p) in polys.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("{\"layer\":");
        json_string(&mut out, p.layer.name());
        out.push_str(",\"kind\":");
        json_string(&mut out, p.kind.name());
        out.push_str(",\"vertices\":[");
        for (j, (x, y)) in p.vertices_mm.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "[{},{}]", format_number(*x), format_number(*y));
        }
        out.push_str("]}");
    }
    out.push(']');
    if !notes.is_empty() {
        out.push_str(",\"notes\":[");
        for (i, n) in notes.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            json_string(&mut out, n);
        }
        out.push(']');
    }
    out.push('}');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{Kind, Layer};
    use proptest::prelude::*;

    #[test]
    fn empty_document() {
        assert_eq!(export_json(&[]), r#"{"units":"mm","polygons":[]}"#);
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(4.4), "4.4");
        assert_eq!(format_number(3.0), "3.0");
        assert_eq!(format_number(-0.0), "0.0");
        assert_eq!(format_number(-1.25), "-1.25");
        assert_eq!(format_number(1.0000004), "1.0");
        assert_eq!(format_number(2.1234567), "2.123457");
    }

    #[test]
    fn parse_back() {
        let p = Polygon::new(
            Layer::Top,
            Kind::Copper,
            vec![(-2.2, -1.625), (2.2, -1.625), (2.2, 1.625), (-2.2, 1.625)],
        )
        .unwrap();
        let doc = export_json_with_notes(
            std::slice::from_ref(&p),
            &["placeholder \"slot\"".to_string()],
        );
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["units"], "mm");
        assert_eq!(v["polygons"][0]["layer"], "top");
        assert_eq!(v["polygons"][0]["kind"], "copper");
        let verts = v["polygons"][0]["vertices"].as_array().unwrap();
        for (got, want) in verts.iter().zip(&p.vertices_mm) {
            assert_eq!(got[0].as_f64().unwrap(), want.0);
            assert_eq!(got[1].as_f64().unwrap(), want.1);
        }
        assert_eq!(v["notes"][0], "placeholder \"slot\"");
    }

    proptest! {
        #[test]
        fn six_digit_values_round_trip(n in -1_000_000_000i64..1_000_000_000i64) {
            let x = n as f64 / 1e6;
            let parsed: f64 = format_number(x).parse().unwrap();
            prop_assert_eq!(parsed, x);
        }
    }
}
