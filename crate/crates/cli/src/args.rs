use boostlab::Algorithm;

/// `start:end:step` (inclusive), `a,b,c`, or a single value.
pub fn parse_k_values(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("bad number `{p}` in `{s}`"));
        let (start, end, step) = match parts[..] {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(format!("expected start:end[:step], got `{s}`")),
        };
        if step == 0 || start == 0 || start > end {
            return Err(format!("empty or invalid range `{s}`"));
        }
        return Ok((start..=end).step_by(step).collect());
    }
    s.split(',')
        .map(|p| match p.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("bad k `{p}`")),
            Ok(k) => Ok(k),
        })
        .collect()
}

pub fn parse_algorithms(s: &str) -> Result<Vec<Algorithm>, String> {
    s.split(',').map(|a| a.parse::<Algorithm>().map_err(|e| e.to_string())).collect()
}

/// Advantage strictly inside (0, 1/2).
pub fn parse_gamma(s: &str) -> Result<f64, String> {
    let g: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(g > 0.0 && g < 0.5) {
        return Err(format!("gamma must lie in (0, 0.5), got {g}"));
    }
    Ok(g)
}

pub fn parse_fraction(s: &str) -> Result<f64, String> {
    let f: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(f > 0.0 && f <= 1.0) {
        return Err(format!("fraction must lie in (0, 1], got {f}"));
    }
    Ok(f)
}
