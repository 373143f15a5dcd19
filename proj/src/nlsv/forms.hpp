#pragma once

#include "nlsv/grid_field.hpp"

namespace nlsv {

struct FormValues {
  double mass = 0.0;            // ||u||_2^2
  double h_form = 0.0;          // int |grad u|^2 + V |u|^2
  double grad_sq = 0.0;         // ||grad u||_2^2
  double l4_fourth = 0.0;       // ||u||_4^4
  double potential_term = 0.0;  // int V |u|^2
};

FormValues form_values(const Field& u, const RealField& V);
FormValues form_values(const SpectralField& u_hat, const Field& u, const RealField& V);

/// E = h_form/2 - sigma l4_fourth/4 (sigma = +1 focusing, -1 defocusing).
double energy(const FormValues& f, double sigma = 1.0);
/// E_0 = grad_sq/2 - sigma l4_fourth/4.
double free_energy(const FormValues& f, double sigma = 1.0);

/// ||u||_4^4 / (||u||_2 ||H^{1/2}u||_2^3). Throws when u = 0 or h_form <= 0.
double wv(const FormValues& f);
double wv(const Field& u, const RealField& V);

struct KatoPositivityCheck {
  double lhs = 0.0;  // int |V| |u|^2
  double rhs = 0.0;  // (K / 4 pi) ||grad u||^2
  bool holds = true;
};

KatoPositivityCheck kato_positivity_check(const Field& u, const RealField& V, double kato_V);

struct SplitInequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
  bool applicable = false;
};

SplitInequalityCheck split_inequality_check(double a1, double a2, double b1, double b2, double c1,
                                            double c2, double eps);

struct SandwichCheck {
  double lower = 0.0;  // (1 - K(V_-)/4 pi) grad_sq
  double upper = 0.0;  // (1 + K(V)/4 pi) grad_sq
  double h_form = 0.0;
  bool holds = true;
};

SandwichCheck form_sandwich(const FormValues& f, double kato_negative, double kato_total);

}  // namespace nlsv
