//! Statistics over the labeled corpus: virality, frame-by-stance
//! contingency tests, regression, annotator agreement and frame timelines.

mod agreement;
mod contingency;
mod linalg;
mod plot;
mod regression;
mod timeline;
mod virality;

pub use agreement::{cohen_kappa, cohen_kappa_exact, krippendorff_alpha, krippendorff_alpha_exact, units_from_coders};
pub use contingency::{chi_square, chi_square_with_threshold, CellResidual, ContingencyTable, ResidualReport, SIGNIFICANCE_THRESHOLD};
pub use plot::{frame_rank_svg, virality_svg};
pub use regression::{fit_regression, RegressionFit, RegressionKind, MAX_IRLS_ITERATIONS, SEPARATION_BOUND};
pub use timeline::{frame_popularity_timeline, frame_shares, DayFrames};
pub use virality::{daily_virality, virality, DayVirality, ViralityRecord, ViralitySeries};
