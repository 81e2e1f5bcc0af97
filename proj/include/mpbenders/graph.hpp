#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpbenders/milp.hpp"
#include "mpbenders/mplp.hpp"

namespace mpb {

enum class Sense { Le, Eq, Ge };

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  double cost = 0.0;
  bool binary = false;
};

struct Term {
  int var = 0;
  double coeff = 0.0;
};

struct LocalRow {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::Le;
  double rhs = 0.0;
};

enum class ParamKind { Cost, Rhs };

// Uncertain datum attached to a node. A Cost parameter adds scale * value to
// the cost of variable `target`; a Rhs parameter adds scale * value to the
// right-hand side of local row `target`. [lo, hi] is its parameter range.
struct ParamDecl {
  std::string name;
  ParamKind kind = ParamKind::Cost;
  int target = 0;
  double scale = 1.0;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct ModelNode {
  std::string name;
  std::vector<Variable> vars;
  std::vector<LocalRow> rows;
  std::vector<ParamDecl> params;

  int add_var(Variable v);
  int add_row(LocalRow r);
  int add_param(ParamDecl p);
  // Cost of var including attached cost parameters.
  double total_cost(int var) const;
  double total_rhs(int row) const;
  void validate() const;
};

struct LinkTerm {
  int node = 0;
  int var = 0;
  double coeff = 0.0;
};

struct LinkConstraint {
  std::string name;
  std::vector<LinkTerm> terms;
  Sense sense = Sense::Le;
  double rhs = 0.0;
};

struct Subgraph {
  std::string name;
  std::vector<int> nodes;
  // Objective weight (scenario probability).
  double weight = 1.0;
  int scenario = -1;
  int period = -1;
};

class ModelGraph {
 public:
  int add_node(ModelNode n);
  // Throws ShapeError unless the terms reference at least two distinct nodes.
  int add_edge(LinkConstraint e);
  int add_subgraph(Subgraph s);
  void set_master(const std::string& subgraph_name);

  const std::vector<ModelNode>& nodes() const { return nodes_; }
  const std::vector<LinkConstraint>& edges() const { return edges_; }
  const std::vector<Subgraph>& subgraphs() const { return subgraphs_; }
  std::optional<int> master() const { return master_; }
  // Subgraph index owning each node.
  std::vector<int> owner() const;

  // Checks node shapes, that subgraphs partition the nodes and that edges
  // reference existing variables. Throws ShapeError or DimensionMismatch.
  void validate() const;

 private:
  std::vector<ModelNode> nodes_;
  std::vector<LinkConstraint> edges_;
  std::vector<Subgraph> subgraphs_;
  std::optional<int> master_;
};

struct AssembledProblem {
  MixedBinaryLp problem;
  // column[node][var] -> flat column.
  std::vector<std::vector<int>> column;
};

// Flattens the graph in (subgraph, node, declaration) order. Node objectives
// are scaled by their subgraph weight; link rows follow local rows, with
// >= rows negated and = links split into two <= rows.
AssembledProblem assemble_monolithic(const ModelGraph& g);

struct BendersPartition {
  MixedBinaryLp master;
  // master_column[node][var] for master nodes; -1 elsewhere.
  std::vector<std::vector<int>> master_column;
  std::vector<ScenarioSubproblemSpec> subs;
};

// Splits a graph with a designated master into the master problem (no cuts)
// and one coupled subproblem per other subgraph. Throws ShapeError when a
// link couples two non-master subgraphs or a subproblem holds binaries.
BendersPartition extract_benders_partition(const ModelGraph& g);

}  // namespace mpb
