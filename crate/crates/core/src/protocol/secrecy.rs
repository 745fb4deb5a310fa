//! Scan of verifier traffic for secret material.

use serde_json::Value;

use crate::model::SecretKey;

const ALLOWED_FIELDS: &[&str] = &["type", "session", "n", "rows", "angles", "t", "accept"];

fn strings_in<'a>(v: &'a Value, out: &mut Vec<&'a str>) {
    match v {
        Value::String(s) => out.push(s),
        Value::Array(items) => items.iter().for_each(|i| strings_in(i, out)),
        Value::Object(map) => map.values().for_each(|i| strings_in(i, out)),
        _ => {}
    }
}

/// Findings for anything in `sent` that looks like key material: a secret
/// bitstring inside any string field, a decimal rendering of an expected
/// value, or a field outside the message schema. Challenge rows are the
/// public program and are exempt from the bitstring check, since a row may
/// legitimately coincide with a secret.
pub fn scan_for_leaks(sent: &[u8], key: &SecretKey) -> Vec<String> {
    let text = String::from_utf8_lossy(sent);
    let mut findings = Vec::new();
    for (i, e) in key.expected().iter().enumerate() {
        let mut renderings = vec![e.to_string()];
        renderings.extend((3..=8).map(|d| format!("{e:.d$}")));
        if let Some(r) = renderings.into_iter().filter(|r| r.contains('.')).find(|r| text.contains(r.as_str())) {
            findings.push(format!("expected value {i} rendered as {r} appears on the wire"));
        }
    }
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let Ok(Value::Object(mut map)) = serde_json::from_str::<Value>(line) else {
            findings.push("outgoing line is not a JSON object".to_string());
            for (i, s) in key.secrets().iter().enumerate() {
                if line.contains(&s.to_string()) {
                    findings.push(format!("secret {i} bitstring {s} appears on the wire"));
                }
            }
            continue;
        };
        for k in map.keys().filter(|k| !ALLOWED_FIELDS.contains(&k.as_str())) {
            findings.push(format!("unexpected field {k:?} in outgoing message"));
        }
        if map.get("type").and_then(Value::as_str) == Some("challenge") {
            map.remove("rows");
        }
        let remaining = Value::Object(map);
        let mut strings = Vec::new();
        strings_in(&remaining, &mut strings);
        for (i, s) in key.secrets().iter().enumerate() {
            let s = s.to_string();
            if strings.iter().any(|v| v.contains(s.as_str())) {
                findings.push(format!("secret {i} bitstring {s} appears on the wire"));
            }
        }
    }
    findings
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_secret_material() {
        let key = SecretKey::single("10110".parse().unwrap(), std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let clean = b"{\"type\":\"challenge\",\"session\":\"a\",\"n\":5,\"rows\":[\"10110\"],\"angles\":[[1,8]],\"t\":3}\n";
        assert!(scan_for_leaks(clean, &key).is_empty());
        let leak = b"{\"type\":\"challenge\",\"session\":\"a-10110\",\"n\":5,\"rows\":[\"11000\"],\"angles\":[[1,8]],\"t\":3}\n";
        assert_eq!(scan_for_leaks(leak, &key).len(), 1);
        let leak = b"{\"type\":\"verdict\",\"session\":\"a\",\"accept\":true,\"expected\":0.7071}\n";
        assert_eq!(scan_for_leaks(leak, &key).len(), 2);
        assert_eq!(scan_for_leaks(b"secret 10110\n", &key).len(), 2);
    }
}
