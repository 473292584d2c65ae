#pragma once

// CSV forms of every report. Each from_csv inverts its to_csv exactly.

#include <vector>

#include "posdelay/certify.hpp"
#include "posdelay/csv.hpp"
#include "posdelay/ddesim.hpp"
#include "posdelay/hypotheses.hpp"

namespace posdelay {

/// hypothesis,verdict,samples_used,field,component,wrt,lambda,value,bound,x1..xn
CsvTable to_csv(const std::vector<HypothesisReport>& reports, std::size_t n);
std::vector<HypothesisReport> hypotheses_from_csv(const CsvTable& t, std::size_t n);

/// One row per probe: w1..wn,satisfied,witness_index, then lhs_i,rhs_neg_i,margin_i per index.
CsvTable to_csv(const std::vector<ConditionReport>& reports, std::size_t n);
std::vector<ConditionReport> conditions_from_csv(const CsvTable& t, std::size_t n);

/// Single row: depth,points_evaluated,margin,v1..vn,h1..hn
CsvTable to_csv(const Certificate& c);
Certificate certificate_from_csv(const CsvTable& t, std::size_t n);

/// t,x1..xn per mesh point.
CsvTable to_csv(const Trajectory& tr);
/// Restores mesh and states; slopes and history are not part of the file.
Trajectory trajectory_from_csv(const CsvTable& t);

/// t,x1..xn,xbar1..xbarn per mesh point.
CsvTable to_csv(const DominanceReport& rep);

/// tau,history_index,history,final_norm,max_negativity,converged,error
CsvTable to_csv(const SweepReport& rep);
SweepReport sweep_from_csv(const CsvTable& t, std::size_t n, double conv_tol);

}  // namespace posdelay
