//! Text report and SVG bar charts for study data.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{average_attempts, group_enhancement, study_summary, AnalyticsError, GroupKey, StudyRecord};

pub fn text_report(records: &[StudyRecord]) -> Result<String, AnalyticsError> {
    let s = study_summary(records)?;
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "Pre-test vs post-test (n = {} / {})", s.n_pre, s.n_post).unwrap();
    writeln!(w, "{:<28}{:>16}{:>16}", "", "Pre-test", "Post-test").unwrap();
    writeln!(w, "{:<28}{:>16.6}{:>16.6}", "Mean (M)", s.mean_pre, s.mean_post).unwrap();
    writeln!(w, "{:<28}{:>16.9}{:>16.6}", "Standard Deviation (SD)", s.sd_pre, s.sd_post).unwrap();
    writeln!(w, "{:<28}{:>16.6}{:>16.6}", "Variance (V)", s.var_pre, s.var_post).unwrap();
    writeln!(w, "{:<28}{:>32}", "Degrees of freedom", s.degrees_of_freedom).unwrap();
    writeln!(w, "{:<28}{:>32.4}", "t-value (two-tailed)", s.t_value).unwrap();
    writeln!(w, "{:<28}{:>32.6e}", "p-value", s.p_value_two_tailed).unwrap();

    for key in [GroupKey::Proficiency, GroupKey::Profession, GroupKey::AgeBucket] {
        writeln!(w).unwrap();
        writeln!(w, "Knowledge enhancement by {}", key.name()).unwrap();
        writeln!(w, "{:<16}{:>4}{:>10}{:>10}{:>10}", "group", "n", "pre %", "post %", "gain %").unwrap();
        for (label, g) in group_enhancement(records, key)? {
            writeln!(
                w,
                "{:<16}{:>4}{:>10.2}{:>10.2}{:>10.2}",
                label, g.participants, g.mean_pre_pct, g.mean_post_pct, g.delta_pct
            )
            .unwrap();
        }
    }

    writeln!(w).unwrap();
    writeln!(w, "Average attempts per level by profession").unwrap();
    for (label, mean) in average_attempts(records, GroupKey::Profession) {
        writeln!(w, "{label:<16}{mean:>8.2}").unwrap();
    }
    Ok(out)
}

/// Grouped bar chart; each series is (name, colour) and `rows` holds one
/// value per series.
fn bar_chart(title: &str, series: &[(&str, &str)], rows: &[(String, Vec<f64>)], max: f64) -> String {
    let (width, height, margin) = (640.0, 360.0, 48.0);
    let plot_h = height - 2.0 * margin;
    let group_w = (width - 2.0 * margin) / rows.len().max(1) as f64;
    let bar_w = group_w * 0.8 / series.len() as f64;
    let mut svg = String::new();
    let s = &mut svg;
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#).unwrap();
    writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, width / 2.0).unwrap();
    writeln!(s, r#"<line x1="{margin}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/>"#, height - margin, width - margin).unwrap();
    for (i, (label, values)) in rows.iter().enumerate() {
        let x0 = margin + i as f64 * group_w + group_w * 0.1;
        for (j, (&v, (_, colour))) in values.iter().zip(series).enumerate() {
            let h = if max > 0.0 { plot_h * v / max } else { 0.0 };
            let x = x0 + j as f64 * bar_w;
            let y = height - margin - h;
            writeln!(s, r#"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{h:.1}" fill="{colour}"/>"#, bar_w * 0.95).unwrap();
            writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{v:.1}</text>"#, x + bar_w / 2.0, y - 3.0).unwrap();
        }
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#, x0 + group_w * 0.4, height - margin + 16.0).unwrap();
    }
    for (j, (name, colour)) in series.iter().enumerate() {
        let y = 34.0 + j as f64 * 14.0;
        writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{colour}"/>"#, width - 150.0, y - 9.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{y}">{name}</text>"#, width - 135.0).unwrap();
    }
    s.push_str("</svg>\n");
    svg
}

/// Writes one enhancement chart per grouping plus an attempts chart.
pub fn write_plots(records: &[StudyRecord], dir: &Path) -> Result<Vec<PathBuf>, AnalyticsError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for key in GroupKey::ALL {
        let rows: Vec<(String, Vec<f64>)> = group_enhancement(records, key)?
            .into_iter()
            .map(|(label, g)| (label, vec![g.mean_pre_pct, g.mean_post_pct]))
            .collect();
        let svg = bar_chart(
            &format!("Knowledge enhancement by {}", key.name()),
            &[("pre-test %", "#9db4c0"), ("post-test %", "#2e6f95")],
            &rows,
            100.0,
        );
        let path = dir.join(format!("enhancement_{}.svg", key.name()));
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    let attempts: Vec<(String, Vec<f64>)> = average_attempts(records, GroupKey::Profession)
        .into_iter()
        .map(|(label, v)| (label, vec![v]))
        .collect();
    let max = attempts.iter().map(|(_, v)| v[0]).fold(0.0, f64::max);
    let svg = bar_chart("Average attempts per level", &[("attempts", "#c07a3d")], &attempts, max * 1.1);
    let path = dir.join("attempts_profession.svg");
    std::fs::write(&path, svg)?;
    written.push(path);
    Ok(written)
}
