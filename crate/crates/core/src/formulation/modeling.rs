//! Helpers that add transfer, headway and synchronization activities with the
//! correct bounds for their arc period.

use crate::network::{ActivityId, ActivityKind, EventId, NetworkBuilder};
use crate::num::{gcd, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelingError {
    #[error("unknown event {0}")]
    UnknownEvent(EventId),
    #[error("bounds [{lower}, {upper}] span more than T_a - 1 = {}", arc_period - 1)]
    SpanTooWide { lower: i64, upper: i64, arc_period: i64 },
    #[error("headway {headway} leaves an empty window for T_a = {arc_period}")]
    HeadwayTooLarge { headway: i64, arc_period: i64 },
    #[error("negative parameter {0}")]
    Negative(i64),
}

fn arc_period(b: &NetworkBuilder, i: EventId, j: EventId) -> Result<i64, ModelingError> {
    let ti = b.period_of(i).ok_or(ModelingError::UnknownEvent(i))?;
    let tj = b.period_of(j).ok_or(ModelingError::UnknownEvent(j))?;
    Ok(gcd(ti, tj))
}

fn push(
    b: &mut NetworkBuilder,
    i: EventId,
    j: EventId,
    lower: i64,
    upper: i64,
    weight: Rational,
    kind: ActivityKind,
) -> ActivityId {
    let id = b.next_activity_id();
    b.add_activity(id, i, j, lower, upper, weight, kind)
}

/// Transfer `[τ⁻, τ⁺]`, or `[τ⁻, τ⁻ + T_a − 1]` when no maximum is given.
pub fn add_transfer(
    b: &mut NetworkBuilder,
    i: EventId,
    j: EventId,
    tau_minus: i64,
    tau_plus: Option<i64>,
    weight: Rational,
) -> Result<ActivityId, ModelingError> {
    let t = arc_period(b, i, j)?;
    let upper = tau_plus.unwrap_or(tau_minus + t - 1);
    if upper < tau_minus || upper - tau_minus > t - 1 {
        return Err(ModelingError::SpanTooWide { lower: tau_minus, upper, arc_period: t });
    }
    Ok(push(b, i, j, tau_minus, upper, weight, ActivityKind::Transfer))
}

/// Headway `[h, T_a − h]`. With `h = 0` the window is the whole period, stored as `[0, T_a − 1]`.
pub fn add_headway(
    b: &mut NetworkBuilder,
    i: EventId,
    j: EventId,
    h: i64,
) -> Result<ActivityId, ModelingError> {
    let t = arc_period(b, i, j)?;
    if h < 0 {
        return Err(ModelingError::Negative(h));
    }
    if 2 * h > t {
        return Err(ModelingError::HeadwayTooLarge { headway: h, arc_period: t });
    }
    let upper = if h == 0 {
        log::warn!("headway 0 between {i} and {j} does not restrict anything");
        t - 1
    } else {
        t - h
    };
    Ok(push(b, i, j, h, upper, crate::num::zero(), ActivityKind::Headway))
}

/// Synchronization `[target − s, target + s]`.
pub fn add_local_sync(
    b: &mut NetworkBuilder,
    i: EventId,
    j: EventId,
    target: i64,
    s: i64,
) -> Result<ActivityId, ModelingError> {
    let t = arc_period(b, i, j)?;
    if s < 0 {
        return Err(ModelingError::Negative(s));
    }
    if 2 * s > t - 1 {
        return Err(ModelingError::SpanTooWide { lower: target - s, upper: target + s, arc_period: t });
    }
    Ok(push(b, i, j, target - s, target + s, crate::num::zero(), ActivityKind::Sync))
}
