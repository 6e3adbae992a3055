//! Static SVG line charts of threshold series.

use plotters::prelude::*;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Logarithmic x axis, for series over `n` spanning decades.
    pub log_x: bool,
    pub series: Vec<Series>,
}

const PALETTE: [RGBColor; 5] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
];

fn bounds(chart: &Chart) -> CliResult<((f64, f64), (f64, f64))> {
    let pts = || chart.series.iter().flat_map(|s| s.points.iter());
    if pts().next().is_none() {
        return Err(CliError::usage(format!(
            "chart '{}' has no points",
            chart.title
        )));
    }
    let fold = |f: fn(&(f64, f64)) -> f64| {
        pts()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    };
    let (x0, x1) = fold(|p| p.0);
    let (_, y1) = fold(|p| p.1);
    let x1 = if x1 > x0 { x1 } else { x0 + 1.0 };
    Ok(((x0, x1), (0.0, (y1 * 1.1).max(1e-3))))
}

/// Renders `chart` as an SVG document.
pub fn render_svg(chart: &Chart) -> CliResult<String> {
    let ((x0, x1), (y0, y1)) = bounds(chart)?;
    if chart.log_x && x0 <= 0.0 {
        return Err(CliError::usage("logarithmic axis needs positive x values"));
    }
    let mut out = String::new();
    {
        let root = SVGBackend::with_string(&mut out, (800, 500)).into_drawing_area();
        let fail = |e: &dyn std::fmt::Display| CliError::Mismatch(format!("plot: {e}"));
        root.fill(&WHITE).map_err(|e| fail(&e))?;
        let mut builder = ChartBuilder::on(&root);
        builder
            .caption(&chart.title, ("sans-serif", 20))
            .margin(15)
            .x_label_area_size(45)
            .y_label_area_size(60);
        macro_rules! draw {
            ($ctx:expr) => {{
                let mut ctx = $ctx.map_err(|e| fail(&e))?;
                ctx.configure_mesh()
                    .x_desc(chart.x_label.as_str())
                    .y_desc(chart.y_label.as_str())
                    .draw()
                    .map_err(|e| fail(&e))?;
                for (i, s) in chart.series.iter().enumerate() {
                    let color = PALETTE[i % PALETTE.len()];
                    ctx.draw_series(LineSeries::new(
                        s.points.iter().copied(),
                        color.stroke_width(2),
                    ))
                    .map_err(|e| fail(&e))?
                    .label(s.label.as_str())
                    .legend(move |(x, y)| {
                        PathElement::new([(x, y), (x + 20, y)], color.stroke_width(2))
                    });
                    ctx.draw_series(s.points.iter().map(|&p| Circle::new(p, 2, color.filled())))
                        .map_err(|e| fail(&e))?;
                }
                ctx.configure_series_labels()
                    .background_style(WHITE.mix(0.8))
                    .border_style(BLACK)
                    .position(SeriesLabelPosition::LowerRight)
                    .draw()
                    .map_err(|e| fail(&e))?;
            }};
        }
        if chart.log_x {
            draw!(builder.build_cartesian_2d((x0..x1).log_scale(), y0..y1));
        } else {
            draw!(builder.build_cartesian_2d(x0..x1, y0..y1));
        }
        root.present().map_err(|e| fail(&e))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(log_x: bool) -> Chart {
        Chart {
            title: "W thresholds".into(),
            x_label: "n".into(),
            y_label: "threshold".into(),
            log_x,
            series: vec![Series {
                label: "hardy".into(),
                points: vec![(10.0, 0.15), (100.0, 0.18), (1000.0, 0.188)],
            }],
        }
    }

    #[test]
    fn renders_deterministic_svg() {
        for log_x in [false, true] {
            let a = render_svg(&chart(log_x)).unwrap();
            assert!(a.starts_with("<svg"));
            assert!(a.contains("W thresholds"));
            assert_eq!(a, render_svg(&chart(log_x)).unwrap());
        }
    }

    #[test]
    fn empty_charts_are_rejected() {
        let mut c = chart(false);
        c.series.clear();
        assert!(render_svg(&c).is_err());
    }
}
