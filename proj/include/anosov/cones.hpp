#pragma once

// Grid-based cone verification.  Constant cones are centred on the
// eigendirections of the linear part: a band around the unstable 2-plane,
// line cones around the strong-unstable, weak-unstable and stable axes.
// At every lattice point the one-step derivative must map the unstable
// cones strictly inside themselves with expansion, the inverse derivative
// must do the same for the stable cone, and the worst-case ratio of
// center growth to strong-unstable growth (and its backward analogue)
// must stay below one.  Grid resolution is a soundness-versus-cost knob,
// not a proof.

#include "anosov/map.hpp"

namespace anosov {

struct ConeRequest {
    double theta_plane = 0.3;   // half-angle of the unstable-plane band
    double theta_uu = 0.3;      // half-angle around the uu axis
    double theta_center = 0.3;  // half-angle around the wu axis
    double theta_s = 0.3;       // half-angle around the s axis
    int grid_n = 32;            // grid_n^3 verification lattice
    int boundary_samples = 720; // samples per cone-boundary circle
};

struct ConeCertificate {
    ConeRequest request;

    // One-step factors over the verification lattice.  "min" and "max"
    // range over unit vectors in the respective cone and lattice points.
    double plane_expansion_min = 0;   // |Df v|, v in the plane band
    double plane_angle_margin = 0;    // theta_plane minus worst image angle
    double uu_expansion_min = 0, uu_expansion_max = 0;
    double uu_angle_margin = 0;
    double center_expansion_min = 0, center_expansion_max = 0;
    double s_inv_expansion_min = 0, s_inv_expansion_max = 0;  // under Df^{-1}
    double s_angle_margin = 0;
    double center_inv_expansion_max = 0;                      // under Df^{-1}

    double gamma_forward = 0;   // worst center_max / uu_min, per point
    double gamma_backward = 0;  // worst center_inv_max / s_inv_min, per point
    double gamma = 0;           // max of the two

    // Headline factors: expansion on the unstable plane cone, expansion
    // of the inverse on the stable cone.
    double expansion() const { return plane_expansion_min; }
    double contraction() const { return s_inv_expansion_min; }

    // Certified one-step growth range of leaf tangents for a tag, in the
    // sense of the view under which that foliation expands (forward for
    // uu/wu, backward for s).
    double leaf_expansion_min(Tag t) const {
        switch (t) {
            case Tag::uu: return uu_expansion_min;
            case Tag::wu: return center_expansion_min;
            default: return s_inv_expansion_min;
        }
    }
    double leaf_expansion_max(Tag t) const {
        switch (t) {
            case Tag::uu: return uu_expansion_max;
            case Tag::wu: return center_expansion_max;
            default: return s_inv_expansion_max;
        }
    }
};

// Throws ConeViolation with the worst lattice point in the message when
// any inequality fails.
ConeCertificate verify_cone_condition(const AnosovMap& map, const ConeRequest& request = {});

}  // namespace anosov
