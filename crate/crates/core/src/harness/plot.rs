//! Static SVG plots.

use std::path::Path;

use plotters::prelude::*;

use super::report::CsvRow;
use crate::{Error, Result};

fn plot_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Plot(e.to_string())
}

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

/// ACK (solid) and NACK (dashed) BER against SNR, log scale.
pub fn plot_ber(curves: &[(String, Vec<CsvRow>)], path: impl AsRef<Path>) -> Result<()> {
    let pts: Vec<&CsvRow> = curves.iter().flat_map(|(_, r)| r).collect();
    if pts.is_empty() {
        return Err(Error::Plot("nothing to plot".into()));
    }
    let x0 = pts.iter().map(|r| r.snr_db).fold(f64::INFINITY, f64::min);
    let x1 = pts.iter().map(|r| r.snr_db).fold(f64::NEG_INFINITY, f64::max).max(x0 + 0.5);
    let floor = pts
        .iter()
        .flat_map(|r| [r.ber_ack, r.ber_nack])
        .filter(|b| *b > 0.0)
        .fold(1.0, f64::min)
        .max(1e-7)
        / 2.0;
    let root = SVGBackend::new(path.as_ref(), (800, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(16)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x0..x1, (floor..1.0).log_scale())
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("SNR (dB)")
        .y_desc("BER")
        .y_label_formatter(&|v| format!("{v:.0e}"))
        .draw()
        .map_err(plot_err)?;
    for (i, (label, rows)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let series = |f: fn(&CsvRow) -> f64| rows.iter().filter(move |r| f(r) > 0.0).map(move |r| (r.snr_db, f(r)));
        chart
            .draw_series(LineSeries::new(series(|r| r.ber_ack), color.stroke_width(2)))
            .map_err(plot_err)?
            .label(format!("{label} ACK"))
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
        chart
            .draw_series(DashedLineSeries::new(series(|r| r.ber_nack), 6, 4, color.stroke_width(2)))
            .map_err(plot_err)?
            .label(format!("{label} NACK"))
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(1)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)
}

/// SNR threshold against a swept prior parameter, one line per scheme.
pub fn plot_snr_th(series: &[(String, Vec<(f64, f64)>)], x_desc: &str, path: impl AsRef<Path>) -> Result<()> {
    let pts: Vec<(f64, f64)> = series.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    if pts.is_empty() {
        return Err(Error::Plot("nothing to plot".into()));
    }
    let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (y0, y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let root = SVGBackend::new(path.as_ref(), (800, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(16)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x0 - 0.02..x1 + 0.02, y0 - 0.5..y1 + 0.5)
        .map_err(plot_err)?;
    chart.configure_mesh().x_desc(x_desc).y_desc("SNR_th (dB)").draw().map_err(plot_err)?;
    for (i, (label, p)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        chart
            .draw_series(LineSeries::new(p.iter().copied(), color.stroke_width(2)))
            .map_err(plot_err)?
            .label(label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
        chart
            .draw_series(p.iter().map(|&xy| Circle::new(xy, 3, color.filled())))
            .map_err(plot_err)?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)
}
