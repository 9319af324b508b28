//! CSV serialization of quality reports.

use std::io::Write;

use crate::analysis::QualityReport;
use crate::error::Result;
use crate::pde::csv_err;
use crate::scalar::Scalar;

pub const QUALITY_HEADER: [&str; 6] = [
    "image_id",
    "entropy",
    "rms_contrast",
    "colourfulness",
    "mean_gradient",
    "cast_score",
];

/// Writes the header and one `image_id, <metrics>` row per report.
pub fn write_quality_csv<W: Write, T: Scalar>(
    out: W,
    rows: &[(String, QualityReport<T>)],
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(QUALITY_HEADER).map_err(csv_err)?;
    for (id, q) in rows {
        let mut row = vec![id.clone()];
        row.extend(q.values().iter().map(|v| v.to_string()));
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::quality_report;
    use crate::image::ImageBuffer;

    #[test]
    fn header_and_rows() {
        let img = ImageBuffer::<f64>::from_fn(4, 4, 3, |x, _, c| (x + c) as f64 / 8.0).unwrap();
        let rows = vec![
            ("a,b".to_string(), quality_report(&img)),
            ("plain".to_string(), quality_report(&img)),
        ];
        let mut out = Vec::new();
        write_quality_csv(&mut out, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(
            lines[0],
            "image_id,entropy,rms_contrast,colourfulness,mean_gradient,cast_score"
        );
        assert!(lines[1].starts_with("\"a,b\","));
        assert_eq!(lines[2].split(',').count(), 6);
    }
}
