//! Parsers for `--n` and `--k` lists.

/// Parses comma-separated items, each a single value (`12`, `2^5`) or an
/// inclusive range (`1..10`, `2^1..2^12`). A range whose endpoints are both
/// powers of two written as `2^a` steps geometrically.
pub fn parse_n_list(input: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in input.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(format!("empty item in '{input}'"));
        }
        match item.split_once("..") {
            Some((a, b)) => {
                let (lo, lo_exp) = parse_value(a)?;
                let (hi, hi_exp) = parse_value(b)?;
                if lo > hi {
                    return Err(format!("empty range '{item}'"));
                }
                match (lo_exp, hi_exp) {
                    (Some(a), Some(b)) => out.extend((a..=b).map(|e| 1usize << e)),
                    (None, None) => out.extend(lo..=hi),
                    _ => return Err(format!("mixed range '{item}': use 2^a..2^b or a..b")),
                }
            }
            None => out.push(parse_value(item)?.0),
        }
    }
    if out.contains(&0) {
        return Err("n must be at least 1".into());
    }
    Ok(out)
}

fn parse_value(s: &str) -> Result<(usize, Option<u32>), String> {
    let s = s.trim();
    if let Some(exp) = s.strip_prefix("2^") {
        let e: u32 = exp.parse().map_err(|_| format!("bad exponent in '{s}'"))?;
        if e >= usize::BITS - 1 {
            return Err(format!("'{s}' is too large"));
        }
        Ok((1usize << e, Some(e)))
    } else {
        s.parse().map(|v| (v, None)).map_err(|_| format!("bad integer '{s}'"))
    }
}

/// Moment orders: same syntax as `--n`, values at least 1.
pub fn parse_k_list(input: &str) -> Result<Vec<u32>, String> {
    parse_n_list(input)
        .map_err(|e| e.replace("n must", "k must"))?
        .into_iter()
        .map(|k| u32::try_from(k).map_err(|_| format!("k = {k} is too large")))
        .collect()
}

/// `scale,offset`.
pub fn parse_transform(input: &str) -> Result<(f64, f64), String> {
    let (a, b) = input
        .split_once(',')
        .ok_or_else(|| format!("transform '{input}' must be 'scale,offset'"))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("bad number '{s}'"))
    };
    Ok((parse(a)?, parse(b)?))
}
