//! Static SVG line plots.

use std::path::Path;

use plotters::prelude::*;

use crate::error::CliError;

pub struct LinePlot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub points: Vec<(f64, f64)>,
    /// Horizontal reference line (the local bound).
    pub bound: Option<f64>,
    /// Vertical marker (a threshold).
    pub marker: Option<f64>,
}

fn span(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.05).max(1e-3);
    (lo - pad, hi + pad)
}

impl LinePlot<'_> {
    pub fn write_svg(&self, path: &Path) -> Result<(), CliError> {
        self.draw(path)
            .map_err(|e| CliError::Output(format!("plot {}: {e}", path.display())))
    }

    fn draw(&self, path: &Path) -> Result<(), Box<dyn std::error::Error>> {
        if self.points.is_empty() {
            return Err("nothing to plot".into());
        }
        let (x0, x1) = span(self.points.iter().map(|p| p.0));
        let (y0, y1) = span(self.points.iter().map(|p| p.1).chain(self.bound));

        let root = SVGBackend::new(path, (720, 480)).into_drawing_area();
        root.fill(&WHITE)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(self.title, ("sans-serif", 22))
            .margin(16)
            .x_label_area_size(40)
            .y_label_area_size(60)
            .build_cartesian_2d(x0..x1, y0..y1)?;
        chart
            .configure_mesh()
            .x_desc(self.x_label)
            .y_desc(self.y_label)
            .draw()?;
        chart.draw_series(LineSeries::new(self.points.iter().copied(), &BLUE))?;
        chart.draw_series(
            self.points
                .iter()
                .map(|&p| Circle::new(p, 3, BLUE.filled())),
        )?;
        if let Some(b) = self.bound {
            chart.draw_series(LineSeries::new([(x0, b), (x1, b)], &BLACK))?;
        }
        if let Some(m) = self.marker {
            chart.draw_series(LineSeries::new([(m, y0), (m, y1)], &RED))?;
        }
        root.present()?;
        Ok(())
    }
}
