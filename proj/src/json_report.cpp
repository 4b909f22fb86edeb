#include "gradspine/json_report.hpp"
