use std::collections::BTreeMap;

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// keys are lower-cased with `_` folded to `-` so they match flag names.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value, got `{line}`", n + 1))?;
        let key = key.trim().to_ascii_lowercase().replace('_', "-");
        let value = value.trim();
        if key.is_empty() {
            return Err(format!("line {}: empty key", n + 1));
        }
        if out.insert(key.clone(), value.to_string()).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", n + 1));
        }
    }
    Ok(out)
}
