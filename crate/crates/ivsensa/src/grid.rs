//! `start:stop:step` grids.
//!
//! Both endpoints are included. When `step` divides `stop - start` up to `1e-12`
//! the points are `start + i * step` with the last one set to exactly `stop`;
//! otherwise the regular points below `stop` are kept and `stop` itself is
//! appended as a final, shorter step.

const SNAP: f64 = 1e-12;

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let [start, stop, step] = parts[..] else {
        return Err(format!("grid `{spec}` is not of the form start:stop:step"));
    };
    let num = |s: &str, what: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("grid `{spec}`: {what} `{s}` is not a finite number"))
    };
    let (start, stop, step) = (num(start, "start")?, num(stop, "stop")?, num(step, "step")?);
    if step <= 0.0 {
        return Err(format!("grid `{spec}`: step must be positive"));
    }
    if stop < start {
        return Err(format!("grid `{spec}`: stop is below start"));
    }
    let span = (stop - start) / step;
    if span > 1e6 {
        return Err(format!("grid `{spec}` has more than a million points"));
    }
    let nearest = span.round();
    let mut points: Vec<f64>;
    if ((span - nearest) * step).abs() <= SNAP {
        let n = nearest as usize;
        points = (0..n).map(|i| start + i as f64 * step).collect();
        points.push(stop);
    } else {
        let n = span.floor() as usize;
        points = (0..=n).map(|i| start + i as f64 * step).collect();
        points.push(stop);
    }
    Ok(points)
}
